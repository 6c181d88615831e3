#pragma once

// Closed-form calculus on F_gamma, the two-dimensional space of H^1 functions
// solving -v'' + gamma^2 v = 0 away from x = +1 and x = -1. Every element is
//     v(x) = a_plus e^{-gamma |x - 1|} + a_minus e^{-gamma |x + 1|}.
// The H^1_gamma scalar product is (u, v)_gamma = int u' v' + gamma^2 u v dx.

#include <cmath>

#include "model.hpp"

namespace smilansky {

struct ExpElement {
    double gamma = 1.0;
    double a_plus = 0.0;
    double a_minus = 0.0;

    /// Value at x = +1 (Side::plus) or x = -1 (Side::minus).
    double value_at(Side p) const {
        const double q = std::exp(-2.0 * gamma);
        return p == Side::plus ? a_plus + a_minus * q : a_minus + a_plus * q;
    }

    double operator()(double x) const {
        return a_plus * std::exp(-gamma * std::abs(x - 1.0)) + a_minus * std::exp(-gamma * std::abs(x + 1.0));
    }

    /// One-sided derivative; `from_right` selects v'(x + 0).
    double derivative(double x, bool from_right = true) const {
        auto term = [&](double a, double c) {
            const double d = x - c;
            const double sgn = d > 0.0 ? 1.0 : (d < 0.0 ? -1.0 : (from_right ? 1.0 : -1.0));
            return -gamma * sgn * a * std::exp(-gamma * std::abs(d));
        };
        return term(a_plus, 1.0) + term(a_minus, -1.0);
    }

    double coefficient(Side p) const { return p == Side::plus ? a_plus : a_minus; }

    ExpElement operator+(const ExpElement& o) const { return {gamma, a_plus + o.a_plus, a_minus + o.a_minus}; }
    ExpElement operator-(const ExpElement& o) const { return {gamma, a_plus - o.a_plus, a_minus - o.a_minus}; }
    ExpElement operator*(double s) const { return {gamma, s * a_plus, s * a_minus}; }

    static ExpElement u_plus(double gamma) { return {gamma, 1.0, 0.0}; }
    static ExpElement u_minus(double gamma) { return {gamma, 0.0, 1.0}; }
};

struct TraceData {
    double value_plus = 0.0;  // u(+1)
    double value_minus = 0.0; // u(-1)

    double at(Side p) const { return p == Side::plus ? value_plus : value_minus; }
};

inline TraceData traces(const ExpElement& e) { return {e.value_at(Side::plus), e.value_at(Side::minus)}; }

/// Uses ||u^+-||^2 = 2 gamma and (u^+, u^-) = 2 gamma e^{-2 gamma}.
inline double h1_inner(const ExpElement& e1, const ExpElement& e2) {
    if (e1.gamma != e2.gamma)
        throw DomainError("h1_inner: elements live in different spaces (gamma mismatch)");
    const double g = e1.gamma;
    const double q = std::exp(-2.0 * g);
    return 2.0 * g * (e1.a_plus * e2.a_plus + e1.a_minus * e2.a_minus + q * (e1.a_plus * e2.a_minus + e1.a_minus * e2.a_plus));
}

inline double h1_norm_squared(const ExpElement& e) { return h1_inner(e, e); }

/// [v'](p) = v'(p+0) - v'(p-0), from the traces alone:
///   [v'](p) = -2 gamma / (1 - e^{-4 gamma}) (v(p) - e^{-2 gamma} v(-p)).
inline double derivative_jump(const ExpElement& e, Side p) {
    const double g = e.gamma;
    const double q = std::exp(-2.0 * g);
    return -2.0 * g / -std::expm1(-4.0 * g) * (e.value_at(p) - q * e.value_at(other(p)));
}

/// The exponential centred at p jumps by -2 gamma; the other one is smooth there.
inline double derivative_jump_direct(const ExpElement& e, Side p) { return -2.0 * e.gamma * e.coefficient(p); }

/// Orthogonal projection of H^1_gamma onto F_gamma: the element with the given traces.
inline ExpElement project(const TraceData& t, double gamma) {
    if (!(gamma > 0.0))
        throw DomainError("project requires gamma > 0");
    const double q = std::exp(-2.0 * gamma);
    const double det = -std::expm1(-4.0 * gamma);
    return {gamma, (t.value_plus - q * t.value_minus) / det, (t.value_minus - q * t.value_plus) / det};
}

/// RHS - LHS of the trace inequality
///   2 gamma (|u(-1)|^2 + |u(1)|^2) <= (1 + e^{-2 gamma}) ||u||_gamma^2.
inline double trace_gap(const TraceData& t, double norm_squared, double gamma) {
    return (1.0 + std::exp(-2.0 * gamma)) * norm_squared -
           2.0 * gamma * (t.value_plus * t.value_plus + t.value_minus * t.value_minus);
}

inline double trace_gap(const ExpElement& e) { return trace_gap(traces(e), h1_norm_squared(e), e.gamma); }

/// Orthonormal pair v^+ = (u^+ + kappa u^-)/rho, v^- = (u^- + kappa u^+)/rho.
struct BasisPair {
    double gamma = 0.0;
    double kappa = 0.0;
    double rho = 0.0;
    double rho_hat = 0.0;
    ExpElement plus;
    ExpElement minus;

    double vplus_at_plus1() const { return 1.0 / rho_hat; }
    double vplus_at_minus1() const { return -kappa / rho_hat; }
    double vminus_at_minus1() const { return 1.0 / rho_hat; }
    double vminus_at_plus1() const { return -kappa / rho_hat; }

    /// C^+ v^+ + C^- v^-.
    ExpElement combine(double c_plus, double c_minus) const {
        return {gamma, (c_plus + kappa * c_minus) / rho, (c_minus + kappa * c_plus) / rho};
    }
};

inline BasisPair basis_pair(double gamma) {
    BasisPair b;
    b.gamma = gamma;
    b.kappa = smilansky::kappa(gamma);
    b.rho_hat = smilansky::rho_hat(gamma);
    b.rho = smilansky::rho(gamma);
    b.plus = {gamma, 1.0 / b.rho, b.kappa / b.rho};
    b.minus = {gamma, b.kappa / b.rho, 1.0 / b.rho};
    return b;
}

} // namespace smilansky
