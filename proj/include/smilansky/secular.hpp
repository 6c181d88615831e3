#pragma once

// Energy-parameterized Birman-Schwinger family. For lambda below the
// threshold every channel, (0,0) included, is closed, and
//     N_-(lambda; A) = N_+(1; K(lambda)),  K(lambda) = -a_+ B'_+(lambda) - a_- B'_-(lambda),
// where B'_+- are assembled with gamma_{m,n} = sqrt(r_{m,n} - lambda).
// Eigenvalues lambda_j are located as the energies where an eigenvalue of K
// crosses 1, i.e. where I - K = I + a_+ B'_+ + a_- B'_- becomes singular.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/OrderingMethods>
#include <Eigen/SparseCholesky>

#include "assembly.hpp"
#include "counting.hpp"
#include "exp_basis.hpp"
#include "inertia.hpp"
#include "parallel.hpp"

namespace smilansky {

inline void require_below_margin(double lambda, double threshold, double margin) {
    if (!(lambda <= threshold - margin * std::abs(threshold)))
        throw DomainError("energy " + std::to_string(lambda) + " is within the margin " + std::to_string(margin) +
                          " (relative) of the threshold " + std::to_string(threshold));
}

/// K(lambda) = -a_+ B'_+ - a_- B'_- on the given lattice.
inline AssembledOperator bs_operator(const ModelParams& params, const Truncation& trunc, double lambda,
                                     double margin = 1e-6) {
    params.validate();
    require_below_margin(lambda, params.threshold(), margin);
    const auto bp = assemble_b_prime(params, trunc, Side::plus, lambda);
    const auto bm = assemble_b_prime(params, trunc, Side::minus, lambda);
    return linear_combination({{-params.alpha_plus, &bp}, {-params.alpha_minus, &bm}},
                              {OperatorKind::birman_schwinger, params, trunc, lambda});
}

/// 64 energies from threshold - depth to threshold (1 - margin), spaced
/// geometrically in the distance to the threshold.
inline std::vector<double> default_lambda_grid(double threshold, double margin = 1e-6, int points = 64,
                                               double depth = 5.0) {
    const double near = margin * std::abs(threshold);
    if (points < 2 || !(depth > near) || !(near > 0.0))
        throw DomainError("lambda grid needs >= 2 points and depth > margin * threshold > 0");
    std::vector<double> grid(static_cast<std::size_t>(points));
    const double ratio = std::log(near / depth) / (points - 1);
    for (int i = 0; i < points; ++i)
        grid[static_cast<std::size_t>(i)] = threshold - depth * std::exp(ratio * i);
    grid.back() = threshold - near;
    return grid;
}

struct Crossing {
    double lambda = 0.0; // midpoint of the final bracket
    double lower = 0.0;
    double upper = 0.0;
    std::int64_t multiplicity = 1;
};

struct EnergyScan {
    std::vector<double> lambda_grid;
    std::vector<std::int64_t> counts;                // N_+(1; K(lambda)) per grid point
    std::vector<std::vector<double>> top_eigenvalues; // largest Ritz values of K(lambda), descending
    std::vector<Crossing> crossings;
    std::vector<std::string> anomalies;
    double tolerance = 0.0;

    /// Eigenvalues below the first grid point (not localized).
    std::int64_t count_below_grid() const { return counts.empty() ? 0 : counts.front(); }
    /// N_-(lambda_last; A): everything the scan accounts for.
    std::int64_t oracle_count() const { return counts.empty() ? 0 : counts.back(); }
    std::int64_t crossings_found() const {
        std::int64_t s = 0;
        for (const auto& c : crossings)
            s += c.multiplicity;
        return s;
    }
};

struct ScanOptions {
    double tolerance = 0.0; // absolute bisection width; 0 selects 1e-10 * |threshold|
    int threads = 1;
    int top_k = 3;          // 0 skips the Ritz diagnostic
    int lanczos_steps = 40;
    CountOptions counting{};
};

namespace detail {

template <class Family>
std::int64_t family_count(Family& family, double lambda, const CountOptions& opts, std::vector<std::string>* notes) {
    const auto c = count_negative(family(lambda), 0.0, opts);
    if (c.ambiguous && notes) {
        char buf[160];
        std::snprintf(buf, sizeof buf, "boundary-ambiguous count at lambda=%.17g (%lld or %lld)", lambda,
                      static_cast<long long>(c.count_low), static_cast<long long>(c.count_high));
        notes->push_back(buf);
    }
    return c.count;
}

[[noreturn]] inline void non_monotone(double a, std::int64_t ca, double b, std::int64_t cb) {
    char buf[200];
    std::snprintf(buf, sizeof buf, "count not monotone in lambda: %lld at %.17g but %lld at %.17g",
                  static_cast<long long>(ca), a, static_cast<long long>(cb), b);
    throw MonotonicityError(buf);
}

template <class Family>
void bisect_cell(Family& family, double a, std::int64_t ca, double b, std::int64_t cb, double tol,
                 const CountOptions& opts, std::vector<Crossing>& out, std::vector<std::string>& notes) {
    if (ca == cb)
        return;
    if (b - a <= tol) {
        out.push_back({0.5 * (a + b), a, b, cb - ca});
        if (cb - ca > 1) {
            char buf[160];
            std::snprintf(buf, sizeof buf, "count jumps by %lld inside [%.17g, %.17g]", static_cast<long long>(cb - ca),
                          a, b);
            notes.push_back(buf);
        }
        return;
    }
    const double mid = 0.5 * (a + b);
    if (mid <= a || mid >= b) { // cannot split further in floating point
        out.push_back({mid, a, b, cb - ca});
        return;
    }
    const auto cm = family_count(family, mid, opts, &notes);
    if (cm < ca || cm > cb)
        non_monotone(a, ca, b, cb);
    bisect_cell(family, a, ca, mid, cm, tol, opts, out, notes);
    bisect_cell(family, mid, cm, b, cb, tol, opts, out, notes);
}

} // namespace detail

/// Generic scan. `family(lambda)` returns I - K(lambda) as an AssembledOperator;
/// its negative inertia is N_+(1; K(lambda)).
template <class Family>
EnergyScan scan_family(Family&& family, const std::vector<double>& grid, const ScanOptions& opts) {
    if (grid.empty())
        throw DomainError("empty lambda grid");
    for (std::size_t i = 1; i < grid.size(); ++i)
        if (!(grid[i] > grid[i - 1]))
            throw DomainError("lambda grid must be strictly increasing");
    if (!(opts.tolerance > 0.0))
        throw DomainError("scan tolerance must be positive");

    EnergyScan s;
    s.lambda_grid = grid;
    s.tolerance = opts.tolerance;
    const std::size_t n = grid.size();
    s.counts.assign(n, 0);
    s.top_eigenvalues.assign(n, {});
    std::vector<std::vector<std::string>> notes(n);
    parallel_for(n, opts.threads, [&](std::size_t i) {
        const auto op = family(grid[i]);
        const auto c = count_negative(op, 0.0, opts.counting);
        s.counts[i] = c.count;
        if (c.ambiguous)
            notes[i].push_back("boundary-ambiguous count at grid point " + std::to_string(i));
        if (opts.top_k > 0) {
            const auto ritz = lanczos_ritz_values(op, opts.lanczos_steps);
            for (std::size_t k = 0; k < ritz.size() && k < static_cast<std::size_t>(opts.top_k); ++k)
                s.top_eigenvalues[i].push_back(1.0 - ritz[k]);
        }
    });
    for (auto& v : notes)
        s.anomalies.insert(s.anomalies.end(), v.begin(), v.end());
    for (std::size_t i = 1; i < n; ++i)
        if (s.counts[i] < s.counts[i - 1])
            detail::non_monotone(grid[i - 1], s.counts[i - 1], grid[i], s.counts[i]);

    std::vector<std::vector<Crossing>> cells(n);
    std::vector<std::vector<std::string>> cell_notes(n);
    parallel_for(n - 1, opts.threads, [&](std::size_t i) {
        detail::bisect_cell(family, grid[i], s.counts[i], grid[i + 1], s.counts[i + 1], opts.tolerance, opts.counting,
                            cells[i], cell_notes[i]);
    });
    for (std::size_t i = 0; i + 1 < n; ++i) {
        s.crossings.insert(s.crossings.end(), cells[i].begin(), cells[i].end());
        s.anomalies.insert(s.anomalies.end(), cell_notes[i].begin(), cell_notes[i].end());
    }
    return s;
}

/// Two-oscillator scan on `trunc` (normally with the origin channel).
inline EnergyScan scan_and_refine(const ModelParams& params, const Truncation& trunc, const std::vector<double>& grid,
                                  ScanOptions opts = {}, double margin = 1e-6) {
    params.validate();
    const double r00 = params.threshold();
    for (const double l : grid)
        require_below_margin(l, r00, margin);
    if (!(opts.tolerance > 0.0))
        opts.tolerance = 1e-10 * r00;
    return scan_family([&](double l) { return assemble_total(params, trunc, l); }, grid, opts);
}

/// Scalar (one-oscillator) family I + alpha J(lambda) on a fixed lattice size.
inline EnergyScan scan_one_oscillator(double alpha, double nu, int size, const std::vector<double>& grid,
                                      ScanOptions opts = {}, double margin = 1e-6) {
    const double threshold = 0.5 * nu * nu;
    for (const double l : grid)
        require_below_margin(l, threshold, margin);
    if (!(opts.tolerance > 0.0))
        opts.tolerance = 1e-10 * threshold;
    return scan_family([&](double l) { return assemble_one_oscillator_total(alpha, nu, size, l); }, grid, opts);
}

struct ResidualOptions {
    bool all_channels = false; // default: interior channels m + n < extent / 2
    double isolation = 1e3;
    int iterations = 3;
    std::uint64_t seed = 1729;
};

struct ResidualReport {
    double max_residual = std::numeric_limits<double>::quiet_NaN();
    double max_residual_plus = 0.0;  // matching condition at x = +1
    double max_residual_minus = 0.0; // matching condition at x = -1
    bool isolated = false;
    double smallest = 0.0; // Ritz values of I - K(lambda_j), ordered by magnitude
    double second = 0.0;
    std::size_t channels_checked = 0;
    Eigen::VectorXd vector;
};

namespace detail {

inline Eigen::MatrixXd thin_q(const Eigen::MatrixXd& y) {
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(y);
    return qr.householderQ() * Eigen::MatrixXd::Identity(y.rows(), y.cols());
}

} // namespace detail

/// Near-null vector of I - K(lambda_j) by block inverse iteration, then the
/// matching conditions checked channel by channel on the reconstructed
/// piecewise exponentials. Residuals are relative to the largest jump.
inline ResidualReport residual_check(const ModelParams& params, const Truncation& trunc, double lambda_j,
                                     const ResidualOptions& opts = {}) {
    params.validate();
    const auto op = assemble_total(params, trunc, lambda_j);
    const Lattice lattice(trunc);
    const auto n = op.dimension();
    const Eigen::Index k = std::min<Eigen::Index>(2, n);
    const auto a = op.to_sparse();
    const double scale = std::max(op.max_abs_row_sum(), 1e-300);

    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>, Eigen::Lower, Eigen::AMDOrdering<int>> ldlt;
    double sigma = 0.0;
    for (int attempt = 0;; ++attempt) {
        Eigen::SparseMatrix<double> id(n, n);
        id.setIdentity();
        ldlt.compute(sigma == 0.0 ? a : Eigen::SparseMatrix<double>(a - sigma * id));
        const bool ok = ldlt.info() == Eigen::Success &&
                        ldlt.vectorD().unaryExpr([](double d) { return std::isfinite(d) && d != 0.0; }).all();
        if (ok)
            break;
        if (attempt == 6)
            throw std::runtime_error("residual_check: factorization of I - K(lambda) failed");
        sigma = sigma == 0.0 ? 1e-13 * scale : 10.0 * sigma;
    }

    std::mt19937_64 rng(opts.seed);
    std::normal_distribution<double> normal;
    Eigen::MatrixXd x(n, k);
    for (Eigen::Index j = 0; j < k; ++j)
        for (Eigen::Index i = 0; i < n; ++i)
            x(i, j) = normal(rng);
    x = detail::thin_q(x);
    for (int it = 0; it < opts.iterations; ++it)
        x = detail::thin_q(ldlt.solve(x));
    Eigen::MatrixXd ax(n, k);
    for (Eigen::Index j = 0; j < k; ++j)
        ax.col(j) = a * x.col(j);
    const Eigen::MatrixXd h = 0.5 * (x.transpose() * ax + ax.transpose() * x);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
    std::vector<Eigen::Index> order(static_cast<std::size_t>(k));
    for (Eigen::Index j = 0; j < k; ++j)
        order[static_cast<std::size_t>(j)] = j;
    std::sort(order.begin(), order.end(), [&](Eigen::Index p, Eigen::Index q) {
        return std::abs(es.eigenvalues()[p]) < std::abs(es.eigenvalues()[q]);
    });

    ResidualReport r;
    r.smallest = es.eigenvalues()[order[0]];
    r.second = k > 1 ? es.eigenvalues()[order[1]] : std::numeric_limits<double>::infinity();
    r.isolated = std::abs(r.second) >= opts.isolation * std::abs(r.smallest);
    r.vector = x * es.eigenvectors().col(order[0]);

    // channel functions u_{m,n} = C^+ v^+ + C^- v^- with gamma = sqrt(r - lambda_j)
    std::vector<ExpElement> u(lattice.size());
    for (std::size_t i = 0; i < lattice.size(); ++i) {
        const auto c = lattice.channel(i);
        const auto pair = basis_pair(channel_gamma(c.m, c.n, params, -lambda_j));
        u[i] = pair.combine(r.vector[static_cast<Eigen::Index>(Lattice::dof(i, Side::plus))],
                            r.vector[static_cast<Eigen::Index>(Lattice::dof(i, Side::minus))]);
    }
    auto trace_of = [&](ChannelIndex c, Side p) {
        const auto i = lattice.index_of(c);
        return i ? u[*i].value_at(p) : 0.0;
    };
    struct Row {
        double lhs, rhs;
        Side side;
        bool checked;
    };
    std::vector<Row> rows;
    const int extent = trunc.extent();
    double norm = 0.0;
    for (std::size_t i = 0; i < lattice.size(); ++i) {
        const auto c = lattice.channel(i);
        const bool checked = opts.all_channels || 2 * (c.m + c.n) < extent;
        r.channels_checked += checked;
        for (const Side p : {Side::plus, Side::minus}) {
            const int k_own = p == Side::plus ? c.m : c.n;
            const ChannelIndex up = p == Side::plus ? ChannelIndex{c.m + 1, c.n} : ChannelIndex{c.m, c.n + 1};
            const ChannelIndex down = p == Side::plus ? ChannelIndex{c.m - 1, c.n} : ChannelIndex{c.m, c.n - 1};
            const double rhs = params.alpha(p) / std::sqrt(2.0) *
                               (std::sqrt(k_own + 1.0) * trace_of(up, p) + std::sqrt(1.0 * k_own) * trace_of(down, p));
            const double lhs = derivative_jump(u[i], p);
            norm = std::max({norm, std::abs(lhs), std::abs(rhs)});
            rows.push_back({lhs, rhs, p, checked});
        }
    }
    if (norm == 0.0)
        norm = 1.0;
    for (const auto& row : rows) {
        if (!row.checked)
            continue;
        const double res = std::abs(row.lhs - row.rhs) / norm;
        auto& slot = row.side == Side::plus ? r.max_residual_plus : r.max_residual_minus;
        slot = std::max(slot, res);
    }
    r.max_residual = std::max(r.max_residual_plus, r.max_residual_minus);
    return r;
}

} // namespace smilansky
