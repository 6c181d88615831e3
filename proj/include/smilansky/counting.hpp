#pragma once

// Eigenvalue counts below the threshold r_{0,0}, truncation convergence and
// the asymptotic predictor M (eta_+^{-1/2} + eta_-^{-1/2}), M = 1/(4 sqrt 2).
//
// Two counts are available for the two-oscillator operator:
//   reduced: N_-(0; I + a_+ B'_+ + a_- B'_-) at energy r00 on the lattice
//            without (0,0), which equals the count for the operator with
//            u_{0,0} removed;
//   full:    N_-(0; same assembly) at energy r00 (1 - margin) with (0,0)
//            reinstated, i.e. the Birman-Schwinger count of eigenvalues of the
//            full operator below r00 (1 - margin).
// The two differ by at most 2 (plus eigenvalues inside the margin window).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "assembly.hpp"
#include "inertia.hpp"
#include "lattice.hpp"
#include "model.hpp"

namespace smilansky {

inline constexpr double asymptotic_constant = 0.17677669529663688; // 1 / (4 sqrt 2)

class NotConvergedError : public std::runtime_error {
public:
    NotConvergedError(const std::string& what, std::vector<std::int64_t> trace)
        : std::runtime_error(what), trace_(std::move(trace)) {}
    const std::vector<std::int64_t>& trace() const { return trace_; }

private:
    std::vector<std::int64_t> trace_;
};

class MonotonicityError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

enum class CountTarget { reduced, full };

inline const char* name_of(CountTarget t) { return t == CountTarget::reduced ? "reduced" : "full"; }

struct Schedule {
    Scheme scheme = Scheme::simplex;
    int L0 = 32;
    double growth = 1.6;
    int stall_window = 3;
    int cap = 4096;

    void validate() const {
        if (L0 < 1 || !(growth > 1.0) || stall_window < 1 || cap < L0)
            throw DomainError("schedule needs L0 >= 1, growth > 1, stall_window >= 1 and cap >= L0");
    }

    /// L_{k+1} = ceil(g L_k), clipped to the cap; nullopt once the cap was used.
    std::optional<int> next(int L) const {
        if (L >= cap)
            return std::nullopt;
        const int n = std::max(L + 1, static_cast<int>(std::ceil(growth * L - 1e-9)));
        return std::min(n, cap);
    }
};

struct SolverSettings {
    CountOptions counting{};
    double margin = 1e-6;          // relative distance below r00 used by the full count
    int lanczos_steps = 40;        // 0 disables the extremal-eigenvalue diagnostic
    std::int64_t lanczos_max_dim = 300000;
};

struct TracePoint {
    int L = 0;
    std::int64_t dimension = 0;
    std::int64_t count = 0;
    bool ambiguous = false;
};

struct CountReport {
    CountTarget target = CountTarget::reduced;
    ModelParams params{};
    Scheme scheme = Scheme::simplex;
    std::int64_t count = 0;
    int L_used = 0;
    std::int64_t dimension = 0;
    bool converged = false;
    bool ambiguous = false;
    std::vector<TracePoint> trace;
    std::vector<std::int64_t> stall_evidence;
    double prediction = 0.0;
    double ratio = std::numeric_limits<double>::quiet_NaN();
    double extremal_eigenvalue = std::numeric_limits<double>::quiet_NaN();
    double energy = 0.0;
};

/// M (eta_+^{-1/2} + eta_-^{-1/2}); a decoupled side contributes nothing.
inline double asymptotic_prediction(const ModelParams& p) {
    require_subcritical(p);
    const auto c = mu_eta(p);
    double s = 0.0;
    if (!c.decoupled(Side::plus))
        s += 1.0 / std::sqrt(c.eta_plus);
    if (!c.decoupled(Side::minus))
        s += 1.0 / std::sqrt(c.eta_minus);
    return asymptotic_constant * s;
}

/// One oscillator: M (mu - 1)^{-1/2}.
inline double one_oscillator_prediction(double alpha, double nu) {
    if (alpha == 0.0)
        return 0.0;
    const double mu = std::sqrt(2.0) * nu / alpha;
    if (!(mu > 1.0))
        throw SupercriticalError("one-oscillator prediction needs mu > 1");
    return asymptotic_constant / std::sqrt(mu - 1.0);
}

inline double counting_energy(const ModelParams& p, CountTarget target, double margin) {
    return target == CountTarget::reduced ? p.threshold() : p.threshold() * (1.0 - margin);
}

inline Truncation counting_truncation(Scheme scheme, int L, CountTarget target) {
    const bool origin = target == CountTarget::full;
    return scheme == Scheme::simplex ? Truncation::simplex(L, origin) : Truncation::rectangle(L, L, origin);
}

/// Number of eigenvalues of I + a_+ B'_+ + a_- B'_- (assembled at `energy`) below 0.
inline InertiaCount count_at_energy(const ModelParams& params, const Truncation& trunc, double energy,
                                    const CountOptions& opts = {}) {
    return count_negative(assemble_total(params, trunc, energy), 0.0, opts);
}

/// Reduced count N_-(r00; A°) on one truncation.
inline InertiaCount count_below_threshold(const ModelParams& params, const Truncation& trunc,
                                          const CountOptions& opts = {}) {
    require_subcritical(params);
    if (trunc.include_origin)
        throw DomainError("the reduced count excludes the (0,0) channel; use a truncation without the origin");
    return count_at_energy(params, trunc, params.threshold(), opts);
}

/// Full count N_-(r00 (1 - margin); A) on one truncation (origin included).
inline InertiaCount count_full(const ModelParams& params, const Truncation& trunc, double margin = 1e-6,
                               const CountOptions& opts = {}) {
    require_subcritical(params);
    if (!(margin > 0.0 && margin < 1.0))
        throw DomainError("margin must lie in (0, 1)");
    return count_at_energy(params, trunc.with_origin(true), params.threshold() * (1.0 - margin), opts);
}

inline double extremal_eigenvalue(const AssembledOperator& op, const SolverSettings& s) {
    if (s.lanczos_steps <= 0 || op.dimension() > s.lanczos_max_dim)
        return std::numeric_limits<double>::quiet_NaN();
    return lanczos_smallest(op, s.lanczos_steps);
}

/// Runs the truncation schedule until the count is constant over the stall
/// window. Returns a non-converged report at the cap.
inline CountReport converge_in_truncation(const ModelParams& params, const Schedule& schedule = {},
                                          const SolverSettings& settings = {},
                                          CountTarget target = CountTarget::reduced) {
    require_subcritical(params);
    schedule.validate();
    CountReport r;
    r.target = target;
    r.params = params;
    r.scheme = schedule.scheme;
    r.energy = counting_energy(params, target, settings.margin);
    r.prediction = asymptotic_prediction(params);

    std::optional<int> L = schedule.L0;
    std::optional<AssembledOperator> last;
    while (L) {
        auto op = assemble_total(params, counting_truncation(schedule.scheme, *L, target), r.energy);
        const auto c = count_negative(op, 0.0, settings.counting);
        if (!r.trace.empty() && c.count < r.trace.back().count && !c.ambiguous && !r.trace.back().ambiguous)
            throw MonotonicityError("count decreased from " + std::to_string(r.trace.back().count) + " at L=" +
                                    std::to_string(r.trace.back().L) + " to " + std::to_string(c.count) +
                                    " at L=" + std::to_string(*L));
        r.trace.push_back({*L, op.dimension(), c.count, c.ambiguous});
        last = std::move(op);
        const auto w = static_cast<std::size_t>(schedule.stall_window);
        if (r.trace.size() >= w &&
            std::all_of(r.trace.end() - static_cast<std::ptrdiff_t>(w), r.trace.end(),
                        [&](const TracePoint& t) { return t.count == r.trace.back().count && !t.ambiguous; })) {
            r.converged = true;
            break;
        }
        L = schedule.next(*L);
    }
    const auto& tail = r.trace.back();
    r.count = tail.count;
    r.L_used = tail.L;
    r.dimension = tail.dimension;
    r.ambiguous = tail.ambiguous;
    for (std::size_t i = r.trace.size() > 3 ? r.trace.size() - 3 : 0; i < r.trace.size(); ++i)
        r.stall_evidence.push_back(r.trace[i].count);
    if (r.prediction > 0.0)
        r.ratio = static_cast<double>(r.count) / r.prediction;
    r.extremal_eigenvalue = extremal_eigenvalue(*last, settings);
    return r;
}

/// N_-(energy; A_{alpha,nu}) for one oscillator with a fixed lattice size.
inline InertiaCount one_oscillator_count_at(double alpha, double nu, double energy, int size,
                                            const CountOptions& opts = {}) {
    if (alpha == 0.0)
        return InertiaCount::exact(0, CountMethod::sturm);
    return count_negative(assemble_one_oscillator_total(alpha, nu, size, energy), 0.0, opts);
}

struct OneOscillatorSchedule {
    int size0 = 64;
    int stall_window = 3;
    int cap = 1 << 22;
};

struct OneOscillatorReport {
    std::int64_t count = 0;
    int size_used = 0;
    std::vector<std::int64_t> trace;
};

/// Size-doubling until the count stalls. Throws NotConvergedError at the cap.
inline OneOscillatorReport one_oscillator_count(double alpha, double nu, double energy,
                                                const OneOscillatorSchedule& schedule = {},
                                                const CountOptions& opts = {}) {
    if (alpha != 0.0 && !(std::sqrt(2.0) * nu / alpha > 1.0))
        throw SupercriticalError("one-oscillator counting requires mu = sqrt(2) nu / alpha > 1");
    OneOscillatorReport r;
    if (alpha == 0.0) {
        r.size_used = schedule.size0;
        r.trace = {0};
        return r;
    }
    for (int size = schedule.size0;; size *= 2) {
        const auto c = one_oscillator_count_at(alpha, nu, energy, size, opts);
        if (!r.trace.empty() && c.count < r.trace.back())
            throw MonotonicityError("one-oscillator count decreased with size");
        r.trace.push_back(c.count);
        r.count = c.count;
        r.size_used = size;
        const auto w = static_cast<std::size_t>(schedule.stall_window);
        if (r.trace.size() >= w && std::all_of(r.trace.end() - static_cast<std::ptrdiff_t>(w), r.trace.end(),
                                               [&](std::int64_t v) { return v == c.count; }))
            return r;
        if (size > schedule.cap / 2)
            throw NotConvergedError("one-oscillator count did not stall before size " + std::to_string(size),
                                    r.trace);
    }
}

/// Eigenvalues below nu^2/2 (1 - margin) with channel m = 0 kept: the full
/// one-oscillator count, at most one above the count at nu^2/2.
inline OneOscillatorReport one_oscillator_full_count(double alpha, double nu, double margin = 1e-6,
                                                     const OneOscillatorSchedule& schedule = {},
                                                     const CountOptions& opts = {}) {
    if (!(margin > 0.0 && margin < 1.0))
        throw DomainError("margin must lie in (0, 1)");
    return one_oscillator_count(alpha, nu, 0.5 * nu * nu * (1.0 - margin), schedule, opts);
}

/// Energy of the n-th block when alpha_- = 0: nu_+^2/2 - nu_-^2 n.
inline double separable_block_energy(const ModelParams& p, int n) {
    return p.nu_plus * p.nu_plus * 0.5 - p.nu_minus * p.nu_minus * n;
}

inline void require_separable(const ModelParams& p) {
    if (p.alpha_minus != 0.0)
        throw DomainError("separable count requires alpha_- = 0");
    require_subcritical(p);
}

/// Sum over n of one-oscillator counts on the truncation matching `trunc`
/// block by block; equals count_below_threshold(params, trunc) exactly.
inline std::int64_t separable_count(const ModelParams& params, const Truncation& trunc,
                                    const CountOptions& opts = {}) {
    require_separable(params);
    if (trunc.include_origin)
        throw DomainError("separable count is taken at the threshold; the origin channel must be excluded");
    trunc.validate();
    const int nmax = trunc.scheme == Scheme::simplex ? trunc.L : trunc.N;
    std::int64_t total = 0;
    for (int n = 0; n <= nmax; ++n) {
        const int size = trunc.scheme == Scheme::simplex ? trunc.L - n : trunc.M;
        const double e = separable_block_energy(params, n);
        if (size < one_oscillator_first_channel(params.nu_plus, e))
            continue;
        total += one_oscillator_count_at(params.alpha_plus, params.nu_plus, e, size, opts).count;
    }
    return total;
}

struct SeparableReport {
    std::int64_t count = 0;
    std::vector<std::int64_t> block_counts; // per n, up to the stopping block
};

/// Converged version: each block is converged in size; the n-sum stops at the
/// first n with energy <= -10 nu_+^2 and a zero count.
inline SeparableReport separable_count_converged(const ModelParams& params, const OneOscillatorSchedule& schedule = {},
                                                 const CountOptions& opts = {}) {
    require_separable(params);
    SeparableReport r;
    const double floor = -10.0 * params.nu_plus * params.nu_plus;
    for (int n = 0;; ++n) {
        const double e = separable_block_energy(params, n);
        const auto c = one_oscillator_count(params.alpha_plus, params.nu_plus, e, schedule, opts).count;
        r.block_counts.push_back(c);
        r.count += c;
        if (e <= floor && c == 0)
            break;
    }
    return r;
}

/// N_+(eps; |X|): eigenvalues of the remainder X with |lambda| > eps.
inline std::int64_t remainder_tail_count(const ModelParams& params, const Truncation& trunc, double eps,
                                         const CountOptions& opts = {}) {
    if (!(eps > 0.0))
        throw DomainError("remainder_tail_count needs eps > 0");
    const auto x = assemble_remainder(params, trunc, params.threshold());
    if (x.nonzeros() == 0)
        return 0;
    const auto below = count_negative(x, -eps, opts).count;
    const auto not_above = count_negative(x, eps, opts).count;
    return below + (x.dimension() - not_above);
}

} // namespace smilansky
