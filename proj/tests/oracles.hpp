#pragma once

// Reference computations for the tests. Deliberately written along other
// routes than the library: Newton on the kappa quadratic, the literal rho
// formula, Gauss-Legendre quadrature and term-by-term form sums.

#include <cmath>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "smilansky/lattice.hpp"
#include "smilansky/model.hpp"

namespace oracle {

using smilansky::ChannelIndex;
using smilansky::Lattice;
using smilansky::ModelParams;
using smilansky::Side;
using smilansky::Truncation;

/// Root in (-1, 0) of k^2 + 2 e^{2g} k + 1, Newton from -e^{-2g}/2 in long double.
inline double kappa_newton(double gamma) {
    const long double b = 2.0L * std::exp(2.0L * gamma);
    long double k = -0.5L / std::exp(2.0L * gamma);
    for (int i = 0; i < 200; ++i) {
        const long double f = k * k + b * k + 1.0L;
        const long double step = f / (2.0L * k + b);
        k -= step;
        if (std::fabs(step) <= 1e-21L * std::fabs(k))
            break;
    }
    return static_cast<double>(k);
}

/// rho^2 = 2 gamma (1 + kappa^2 + 2 kappa e^{-2 gamma}).
inline long double rho_squared_literal(double gamma) {
    const long double k = kappa_newton(gamma);
    const long double q = std::exp(-2.0L * gamma);
    return 2.0L * gamma * (1.0L + k * k + 2.0L * k * q);
}

inline double rho_hat_literal(double gamma) {
    const long double r2 = rho_squared_literal(gamma);
    return static_cast<double>(std::sqrt(r2 / (1.0L - std::exp(-4.0L * gamma))));
}

struct GaussLegendre {
    std::vector<double> nodes, weights;

    explicit GaussLegendre(int order) {
        for (int i = 1; i <= order; ++i) {
            double x = std::cos(M_PI * (i - 0.25) / (order + 0.5));
            double dp = 0.0;
            for (int it = 0; it < 100; ++it) {
                double p0 = 1.0, p1 = x;
                for (int k = 2; k <= order; ++k) {
                    const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                    p0 = p1;
                    p1 = p2;
                }
                dp = order * (x * p1 - p0) / (x * x - 1.0);
                const double dx = p1 / dp;
                x -= dx;
                if (std::abs(dx) < 1e-16)
                    break;
            }
            nodes.push_back(x);
            weights.push_back(2.0 / ((1.0 - x * x) * dp * dp));
        }
    }
};

/// Composite Gauss-Legendre on [-X, X], X = 40 / gamma, 64 panels in each of
/// [-X, -1], [-1, 1], [1, X] so the kinks at +-1 sit on panel edges.
template <class F>
double integrate_line(F f, double gamma) {
    static const GaussLegendre gl(12);
    const double X = std::max(40.0 / gamma, 2.0);
    const double cuts[4] = {-X, -1.0, 1.0, X};
    double s = 0.0;
    for (int seg = 0; seg < 3; ++seg) {
        const double a = cuts[seg], b = cuts[seg + 1];
        const int panels = 64;
        const double h = (b - a) / panels;
        for (int p = 0; p < panels; ++p) {
            const double mid = a + (p + 0.5) * h;
            for (std::size_t k = 0; k < gl.nodes.size(); ++k)
                s += 0.5 * h * gl.weights[k] * f(mid + 0.5 * h * gl.nodes[k]);
        }
    }
    return s;
}

/// Channel function rebuilt from (C+, C-) with the oracle kappa and rho;
/// returns its values at +1 and -1 by summing the exponentials directly.
struct ChannelTrace {
    double at_plus = 0.0;
    double at_minus = 0.0;
};

inline ChannelTrace channel_trace(double gamma, double c_plus, double c_minus) {
    const double k = kappa_newton(gamma);
    const double r = static_cast<double>(std::sqrt(rho_squared_literal(gamma)));
    const double a_plus = (c_plus + k * c_minus) / r;
    const double a_minus = (c_minus + k * c_plus) / r;
    const double far = std::exp(-gamma * 2.0);
    return {a_plus + a_minus * far, a_minus + a_plus * far};
}

/// b'_side[C] = sum sqrt(2k) u_{c}(p) u_{c - e}(p) over lattice neighbour pairs.
inline double b_prime_form(const ModelParams& p, const Truncation& t, Side side, double energy,
                           const Eigen::VectorXd& c) {
    const Lattice lat(t);
    std::vector<ChannelTrace> tr(lat.size());
    for (std::size_t i = 0; i < lat.size(); ++i) {
        const auto ch = lat.channel(i);
        const double r = p.nu_plus * p.nu_plus * (ch.m + 0.5) + p.nu_minus * p.nu_minus * (ch.n + 0.5);
        tr[i] = channel_trace(std::sqrt(r - energy), c[2 * static_cast<Eigen::Index>(i)],
                              c[2 * static_cast<Eigen::Index>(i) + 1]);
    }
    double s = 0.0;
    for (std::size_t i = 0; i < lat.size(); ++i) {
        const auto ch = lat.channel(i);
        const int k = side == Side::plus ? ch.m : ch.n;
        if (k == 0)
            continue;
        const ChannelIndex nb = side == Side::plus ? ChannelIndex{ch.m - 1, ch.n} : ChannelIndex{ch.m, ch.n - 1};
        const auto j = lat.index_of(nb);
        if (!j)
            continue;
        const double vi = side == Side::plus ? tr[i].at_plus : tr[i].at_minus;
        const double vj = side == Side::plus ? tr[*j].at_plus : tr[*j].at_minus;
        s += std::sqrt(2.0 * k) * vi * vj;
    }
    return s;
}

inline std::int64_t dense_negative_count(const Eigen::MatrixXd& a, double shift) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a, Eigen::EigenvaluesOnly);
    std::int64_t n = 0;
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
        n += es.eigenvalues()[i] < shift;
    return n;
}

inline Eigen::VectorXd sorted_eigenvalues(const Eigen::MatrixXd& a) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a, Eigen::EigenvaluesOnly);
    return es.eigenvalues();
}

} // namespace oracle
