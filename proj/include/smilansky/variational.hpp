#pragma once

// Closed-form evaluation of the full quadratic form
//   a[U] + a_+ b_+[U] + a_- b_-[U],
//   a[U]   = sum int |u_{m,n}'|^2 + r_{m,n} |u_{m,n}|^2 dx,
//   b_+[U] = sum sqrt(2m) u_{m,n}(1) u_{m-1,n}(1),   b_-[U] = mirror at x = -1,
// on states with finitely many channels, each a plateau profile or a finite
// sum of centred exponentials. Also the shift-constant bound C(m,n,k) and f_k.

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>
#include <utility>
#include <variant>
#include <vector>

#include <Eigen/Core>

#include "exp_basis.hpp"
#include "lattice.hpp"
#include "model.hpp"

namespace smilansky {

/// height * min(1, e^{-(eps |x| - 1)}): flat on |x| <= 1/eps, exponential tails.
struct PlateauProfile {
    double height = 0.0;
    double eps = 1.0;
};

struct ExpTerm {
    double coef = 0.0;
    double gamma = 1.0;
    double center = 0.0;
};

struct ExpSum {
    std::vector<ExpTerm> terms;
};

using ChannelProfile = std::variant<PlateauProfile, ExpSum>;

struct FiniteElementState {
    std::map<ChannelIndex, ChannelProfile> channels;
};

namespace detail {

/// int e^{-g1 |x|} e^{-g2 |x - d|} dx and the matching derivative integral, d >= 0.
struct PairIntegrals {
    double value;
    double derivative;
};

inline PairIntegrals exp_pair(double g1, double g2, double d) {
    const double e1 = std::exp(-g1 * d);
    const double e2 = std::exp(-g2 * d);
    const double outer = (e1 + e2) / (g1 + g2);
    // (e1 - e2) / (g2 - g1), continuous at g1 = g2 where it equals d e^{-g d}
    const double diff = g1 == g2 ? d * e1 : e1 * -std::expm1(-(g2 - g1) * d) / (g2 - g1);
    return {outer + diff, g1 * g2 * (outer - diff)};
}

inline double profile_value(const PlateauProfile& p, double x) {
    return p.height * std::min(1.0, std::exp(1.0 - p.eps * std::abs(x)));
}

inline double profile_value(const ExpSum& s, double x) {
    double v = 0.0;
    for (const auto& t : s.terms)
        v += t.coef * std::exp(-t.gamma * std::abs(x - t.center));
    return v;
}

/// {int u^2, int u'^2}
inline std::pair<double, double> profile_integrals(const PlateauProfile& p) {
    if (!(p.eps > 0.0))
        throw DomainError("plateau profile needs eps > 0");
    const double h2 = p.height * p.height;
    return {3.0 * h2 / p.eps, h2 * p.eps};
}

inline std::pair<double, double> profile_integrals(const ExpSum& s) {
    double l2 = 0.0, d2 = 0.0;
    for (const auto& a : s.terms)
        for (const auto& b : s.terms) {
            if (!(a.gamma > 0.0) || !(b.gamma > 0.0))
                throw DomainError("exponential terms need gamma > 0");
            const bool a_left = a.center <= b.center;
            const auto& l = a_left ? a : b;
            const auto& r = a_left ? b : a;
            const auto pi = exp_pair(l.gamma, r.gamma, r.center - l.center);
            l2 += a.coef * b.coef * pi.value;
            d2 += a.coef * b.coef * pi.derivative;
        }
    return {l2, d2};
}

inline double value_at(const FiniteElementState& s, ChannelIndex c, double x) {
    const auto it = s.channels.find(c);
    if (it == s.channels.end())
        return 0.0;
    return std::visit([x](const auto& p) { return profile_value(p, x); }, it->second);
}

} // namespace detail

inline double norm_squared(const FiniteElementState& s) {
    double n = 0.0;
    for (const auto& [c, prof] : s.channels)
        n += std::visit([](const auto& p) { return detail::profile_integrals(p).first; }, prof);
    return n;
}

/// a[U] + a_+ b_+[U] + a_- b_-[U].
inline double full_form_value(const FiniteElementState& s, const ModelParams& params) {
    params.validate();
    double form = 0.0;
    for (const auto& [c, prof] : s.channels) {
        if (c.m < 0 || c.n < 0)
            throw DomainError("channel indices must be non-negative");
        const auto [l2, d2] = std::visit([](const auto& p) { return detail::profile_integrals(p); }, prof);
        form += d2 + channel_energy(c.m, c.n, params) * l2;
        if (c.m > 0)
            form += params.alpha_plus * std::sqrt(2.0 * c.m) * detail::value_at(s, c, 1.0) *
                    detail::value_at(s, {c.m - 1, c.n}, 1.0);
        if (c.n > 0)
            form += params.alpha_minus * std::sqrt(2.0 * c.n) * detail::value_at(s, c, -1.0) *
                    detail::value_at(s, {c.m, c.n - 1}, -1.0);
    }
    return form;
}

/// form - energy * ||U||^2
inline double form_excess(const FiniteElementState& s, const ModelParams& params, double energy) {
    return full_form_value(s, params) - energy * norm_squared(s);
}

/// Trial state with u_{0,0} = -eps^{-1/2} min(1, e^{-(eps|x| - 1)}),
/// u_{1,0} = e^{-|x-1|}, u_{0,1} = e^{-|x+1|}.
inline FiniteElementState negative_energy_trial(double eps) {
    if (!(eps > 0.0))
        throw DomainError("trial state needs eps > 0");
    FiniteElementState s;
    s.channels[{0, 0}] = PlateauProfile{-1.0 / std::sqrt(eps), eps};
    s.channels[{1, 0}] = ExpSum{{{1.0, 1.0, 1.0}}};
    s.channels[{0, 1}] = ExpSum{{{1.0, 1.0, -1.0}}};
    return s;
}

/// Closed form of form_excess(trial(eps), params, r00) for eps <= 1:
/// 3 + nu_+^2 + nu_-^2 - eps^{-1/2} sqrt(2) (a_+ + a_-).
inline double trial_excess_closed_form(const ModelParams& p, double eps) {
    return 3.0 + p.nu_plus * p.nu_plus + p.nu_minus * p.nu_minus -
           std::sqrt(2.0) * (p.alpha_plus + p.alpha_minus) / std::sqrt(eps);
}

/// eps below which the trial state has form < r00 ||U||^2 (closed form).
inline double trial_threshold_closed_form(const ModelParams& p) {
    const double s = std::sqrt(2.0) * (p.alpha_plus + p.alpha_minus) /
                     (3.0 + p.nu_plus * p.nu_plus + p.nu_minus * p.nu_minus);
    return s * s;
}

/// Sign change of the trial excess in eps, by bisection on [lo, hi].
inline double trial_sign_change(const ModelParams& p, double lo = 1e-8, double hi = 1.0, double tol = 1e-14) {
    auto f = [&](double e) { return form_excess(negative_energy_trial(e), p, p.threshold()); };
    double flo = f(lo), fhi = f(hi);
    if (!(flo < 0.0 && fhi > 0.0))
        throw DomainError("trial excess does not change sign on the bracket");
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        if (f(mid) < 0.0)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

/// State with u_{m,n} = C^+ v^+ + C^- v^- (gamma = sqrt(r - energy)) on every lattice channel.
inline FiniteElementState state_from_coefficients(const ModelParams& params, const Truncation& trunc,
                                                  const Eigen::VectorXd& c, double energy) {
    const Lattice lat(trunc);
    if (c.size() != static_cast<Eigen::Index>(lat.dofs()))
        throw DomainError("coefficient vector length does not match the lattice");
    FiniteElementState s;
    for (std::size_t i = 0; i < lat.size(); ++i) {
        const auto ch = lat.channel(i);
        const auto e = basis_pair(channel_gamma(ch.m, ch.n, params, -energy))
                           .combine(c[static_cast<Eigen::Index>(Lattice::dof(i, Side::plus))],
                                    c[static_cast<Eigen::Index>(Lattice::dof(i, Side::minus))]);
        s.channels[ch] = ExpSum{{{e.a_plus, e.gamma, 1.0}, {e.a_minus, e.gamma, -1.0}}};
    }
    return s;
}

/// C(m,n,k) = gamma_{m,n}(0) / gamma_{m,n}(k) * (1 + e^{-2 gamma_{m,n}(k)}).
inline double shift_constant(int m, int n, double k, const ModelParams& p) {
    const double g0 = channel_gamma(m, n, p, 0.0);
    const double gk = channel_gamma(m, n, p, k);
    return g0 / gk * (1.0 + std::exp(-2.0 * gk));
}

struct ShiftConstantResult {
    double worst = 0.0;
    ChannelIndex at{};
};

/// max C(m,n,k) over m + n <= max_sum.
inline ShiftConstantResult shift_constant_check(double k, int max_sum, const ModelParams& p) {
    if (!(k > 0.0))
        throw DomainError("shift constant needs k > 0");
    p.validate();
    ShiftConstantResult r{-1.0, {}};
    for (int s = 0; s <= max_sum; ++s)
        for (int m = 0; m <= s; ++m) {
            const double c = shift_constant(m, s - m, k, p);
            if (c > r.worst)
                r = {c, {m, s - m}};
        }
    return r;
}

/// f_k(t) = (1 - k t^{-2})^{1/2} (1 + e^{-2t}), t >= sqrt(k).
inline double fk(double k, double t) {
    const double a = 1.0 - k / (t * t);
    return std::sqrt(std::max(a, 0.0)) * (1.0 + std::exp(-2.0 * t));
}

/// min over the grid of the central difference of f_k, h = 1e-6 t.
inline double fk_monotonicity(double k, const std::vector<double>& t_grid) {
    double worst = std::numeric_limits<double>::infinity();
    for (const double t : t_grid) {
        if (!(t > std::sqrt(k)))
            throw DomainError("f_k grid must lie in (sqrt(k), inf)");
        const double h = 1e-6 * t;
        worst = std::min(worst, (fk(k, t + h) - fk(k, t - h)) / (2.0 * h));
    }
    return worst;
}

} // namespace smilansky
