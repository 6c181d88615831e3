#pragma once

// Variational and trace-inequality checks shared by `selfcheck` and the
// acceptance binary. Each returns a named pass/fail line with the measured value.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "../exp_basis.hpp"
#include "../variational.hpp"

namespace smilansky::harness {

struct CheckResult {
    std::string name;
    bool pass = false;
    std::string detail;
};

inline std::string sci(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.3e", v);
    return buf;
}

/// Random (nu, alpha, eps) with alpha_+- in (0, sqrt(2) nu_+-); compares the
/// trial excess with its closed form and the sign change with eps*.
inline CheckResult check_trial_function(int samples, std::uint64_t seed = 7) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> nu(0.5, 2.0), frac(0.05, 0.95), eps(0.01, 1.0);
    double worst_value = 0.0, worst_threshold = 0.0;
    for (int i = 0; i < samples; ++i) {
        const double np = nu(rng), nm = nu(rng);
        const ModelParams p{std::sqrt(2.0) * np * frac(rng), std::sqrt(2.0) * nm * frac(rng), np, nm};
        const double e = eps(rng);
        const double v = form_excess(negative_energy_trial(e), p, p.threshold());
        worst_value = std::max(worst_value, std::abs(v - trial_excess_closed_form(p, e)));
        worst_threshold =
            std::max(worst_threshold, std::abs(trial_sign_change(p) - trial_threshold_closed_form(p)));
    }
    return {"trial function closed form", worst_value <= 1e-10 && worst_threshold <= 1e-10,
            "max |form - closed| = " + sci(worst_value) + ", max |eps_sign - eps*| = " + sci(worst_threshold)};
}

inline CheckResult check_shift_constant(int max_sum) {
    const ModelParams p{0.0, 0.0, 1.0, 1.0};
    const auto bound = shift_constant_check(0.3360629, max_sum, p);
    const auto control = shift_constant_check(0.01, max_sum, p);
    return {"shift constant bound", bound.worst <= 1.0 + 1e-12 && control.worst > 1.0,
            "max C(k=0.3360629) = " + sci(bound.worst) + ", max C(k=0.01) = " + sci(control.worst) +
                " on m+n <= " + std::to_string(max_sum)};
}

inline CheckResult check_fk(int points) {
    const double k = 0.34;
    std::vector<double> grid(static_cast<std::size_t>(points));
    const double lo = std::sqrt(k) + 0.01, hi = 50.0;
    for (int i = 0; i < points; ++i)
        grid[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (points - 1);
    const double min_slope = fk_monotonicity(k, grid);
    // sqrt(k) is rounded and f_k has an infinite slope at its root, so f_k(fl(sqrt k)) ~ sqrt(eps);
    // a dyadic root gives the exact zero
    const double at_root = fk(k, std::sqrt(k));
    const double at_dyadic_root = fk(0.25, 0.5);
    const double at_50 = fk(k, 50.0);
    // k = 0.05 should fail somewhere on the same kind of grid
    std::vector<double> control(static_cast<std::size_t>(points));
    const double clo = std::sqrt(0.05) + 0.01;
    for (int i = 0; i < points; ++i)
        control[static_cast<std::size_t>(i)] = clo + (hi - clo) * i / (points - 1);
    const double control_slope = fk_monotonicity(0.05, control);
    // f_k(t) = 1 - k / (2 t^2) + O(t^-4): the limit 1 is approached algebraically, not exponentially
    const double far = fk(k, 1e7);
    const bool pass = min_slope >= -1e-8 && std::abs(at_root) <= 1e-7 && at_dyadic_root == 0.0 &&
                      std::abs(at_50 - 1.0) <= k / (50.0 * 50.0) &&
                      std::abs(far - 1.0) <= 1e-12 && control_slope < 0.0;
    return {"f_k monotonicity", pass,
            "min f_k' = " + sci(min_slope) + ", f_k(sqrt k) = " + sci(at_root) + ", f_0.25(0.5) = " +
                sci(at_dyadic_root) + ", f_k(50) - 1 = " + sci(at_50 - 1.0) + ", control min f' = " +
                sci(control_slope)};
}

inline std::vector<double> trace_gamma_grid() {
    std::vector<double> g;
    for (double x = 0.05; x <= 30.0 + 1e-9; x += 0.05)
        g.push_back(x);
    return g;
}

/// Random trace pairs through the minimal-norm extension, plus the equality case.
inline CheckResult check_trace_inequality(std::int64_t pairs, std::uint64_t seed = 11) {
    const auto grid = trace_gamma_grid();
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    double worst = std::numeric_limits<double>::infinity();
    for (std::int64_t i = 0; i < pairs; ++i) {
        const double g = grid[static_cast<std::size_t>(i) % grid.size()];
        const TraceData t{normal(rng), normal(rng)};
        worst = std::min(worst, trace_gap(project(t, g)));
    }
    double equality = 0.0;
    for (const double g : grid) {
        const auto e = ExpElement{g, 1.0, 1.0};
        equality = std::max(equality, std::abs(trace_gap(e)));
    }
    return {"trace inequality", worst >= -1e-12 && equality <= 1e-12,
            "min gap = " + sci(worst) + " over " + std::to_string(pairs) +
                " pairs, equality-case gap = " + sci(equality)};
}

} // namespace smilansky::harness
