#pragma once

// Model parameters and per-channel scalars for the two-oscillator graph.
//
// The graph is the real line with oscillators attached at x = +1 and x = -1.
// A state is expanded over channels (m, n) of the two oscillators; channel
// (m, n) carries the energy offset r_{m,n} = nu_+^2 (m + 1/2) + nu_-^2 (n + 1/2).

#include <cmath>
#include <compare>
#include <limits>
#include <stdexcept>
#include <string>

namespace smilansky {

class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Raised by counting operations when mu_+ <= 1 or mu_- <= 1.
class SupercriticalError : public DomainError {
public:
    using DomainError::DomainError;
};

enum class Side { plus, minus };

inline constexpr Side other(Side s) { return s == Side::plus ? Side::minus : Side::plus; }
inline constexpr double point_of(Side s) { return s == Side::plus ? 1.0 : -1.0; }
inline constexpr const char* name_of(Side s) { return s == Side::plus ? "+" : "-"; }

struct ChannelIndex {
    int m = 0;
    int n = 0;

    auto operator<=>(const ChannelIndex&) const = default;
};

struct ModelParams {
    double alpha_plus = 0.0;
    double alpha_minus = 0.0;
    double nu_plus = 1.0;
    double nu_minus = 1.0;

    bool operator==(const ModelParams&) const = default;

    void validate() const {
        if (!(nu_plus > 0.0) || !(nu_minus > 0.0) || !std::isfinite(nu_plus) || !std::isfinite(nu_minus))
            throw DomainError("oscillator frequencies nu_+ and nu_- must be positive and finite");
        if (!(alpha_plus >= 0.0) || !(alpha_minus >= 0.0) || !std::isfinite(alpha_plus) ||
            !std::isfinite(alpha_minus))
            throw DomainError("coupling strengths alpha_+ and alpha_- must be finite and non-negative");
    }

    double alpha(Side s) const { return s == Side::plus ? alpha_plus : alpha_minus; }
    double nu(Side s) const { return s == Side::plus ? nu_plus : nu_minus; }

    /// Bottom of the continuous spectrum in the subcritical regime, r_{0,0}.
    double threshold() const { return (nu_plus * nu_plus + nu_minus * nu_minus) / 2.0; }

    /// (alpha_+, nu_+) <-> (alpha_-, nu_-).
    ModelParams swapped() const { return {alpha_minus, alpha_plus, nu_minus, nu_plus}; }

    /// alpha_+/- = sqrt(2) nu_+/- / (1 + eta_+/-).
    static ModelParams from_eta(double eta_plus, double eta_minus, double nu_plus = 1.0, double nu_minus = 1.0) {
        if (!(eta_plus > 0.0) || !(eta_minus > 0.0))
            throw DomainError("eta_+ and eta_- must be positive");
        ModelParams p{std::sqrt(2.0) * nu_plus / (1.0 + eta_plus), std::sqrt(2.0) * nu_minus / (1.0 + eta_minus),
                      nu_plus, nu_minus};
        p.validate();
        return p;
    }
};

/// Criticality measures. A decoupled side (alpha = 0) has mu = eta = +infinity.
struct Criticality {
    double mu_plus;
    double mu_minus;
    double eta_plus;
    double eta_minus;

    bool decoupled(Side s) const { return std::isinf(s == Side::plus ? mu_plus : mu_minus); }
    bool subcritical() const { return mu_plus > 1.0 && mu_minus > 1.0; }
};

inline Criticality mu_eta(const ModelParams& p) {
    p.validate();
    constexpr double inf = std::numeric_limits<double>::infinity();
    auto mu = [](double alpha, double nu) { return alpha == 0.0 ? inf : std::sqrt(2.0) * nu / alpha; };
    const double mp = mu(p.alpha_plus, p.nu_plus);
    const double mm = mu(p.alpha_minus, p.nu_minus);
    return {mp, mm, mp - 1.0, mm - 1.0};
}

inline void require_subcritical(const ModelParams& p) {
    const auto c = mu_eta(p);
    if (!c.subcritical())
        throw SupercriticalError("counting requires the subcritical regime mu_+/- = sqrt(2) nu_+/- / alpha_+/- > 1 "
                                 "(got mu_+ = " + std::to_string(c.mu_plus) +
                                 ", mu_- = " + std::to_string(c.mu_minus) + ")");
}

inline double channel_energy(int m, int n, const ModelParams& p) {
    return p.nu_plus * p.nu_plus * (m + 0.5) + p.nu_minus * p.nu_minus * (n + 0.5);
}

/// gamma_{m,n}(shift) = sqrt(r_{m,n} + shift).
inline double channel_gamma(int m, int n, const ModelParams& p, double shift) {
    const double radicand = channel_energy(m, n, p) + shift;
    if (!(radicand >= 0.0))
        throw DomainError("channel (" + std::to_string(m) + "," + std::to_string(n) +
                          ") is open at this energy (r + shift = " + std::to_string(radicand) + ")");
    return std::sqrt(radicand);
}

/// Root in (-1, 0] of kappa^2 + 2 e^{2 gamma} kappa + 1 = 0.
inline double kappa(double gamma) {
    if (!(gamma >= 0.0))
        throw DomainError("kappa requires gamma >= 0");
    // -1 / (e^{2g} + sqrt(e^{4g} - 1)) rewritten in terms of e^{-2g}
    const double q = std::exp(-2.0 * gamma);
    return -q / (1.0 + std::sqrt(-std::expm1(-4.0 * gamma)));
}

/// rho_hat = rho (1 - e^{-4 gamma})^{-1/2}, rho^2 = 2 gamma (1 + kappa^2 + 2 kappa e^{-2 gamma}).
inline double rho_hat(double gamma) {
    if (!(gamma > 0.0))
        throw DomainError("rho_hat requires gamma > 0 (the channel is degenerate at gamma = 0)");
    // Using the kappa equation, 1 + kappa^2 + 2 kappa e^{-2g} = -2 kappa (e^{2g} - e^{-2g}).
    return std::sqrt(4.0 * gamma / (1.0 + std::sqrt(-std::expm1(-4.0 * gamma))));
}

inline double rho(double gamma) {
    return rho_hat(gamma) * std::sqrt(-std::expm1(-4.0 * gamma));
}

struct ChannelScalars {
    double r = 0.0;
    double gamma = 0.0;
    double kappa = -1.0;
    double rho = 0.0;
    double rho_hat = 0.0;
};

/// Scalars of channel (m, n) at the given energy: gamma = sqrt(r_{m,n} - energy).
inline ChannelScalars channel_scalars(int m, int n, const ModelParams& p, double energy) {
    ChannelScalars s;
    s.r = channel_energy(m, n, p);
    s.gamma = channel_gamma(m, n, p, -energy);
    s.kappa = kappa(s.gamma);
    if (s.gamma > 0.0) {
        s.rho_hat = rho_hat(s.gamma);
        s.rho = rho(s.gamma);
    }
    return s;
}

} // namespace smilansky
