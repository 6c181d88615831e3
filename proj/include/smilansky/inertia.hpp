#pragma once

// Eigenvalue counting by inertia.
//
// count_negative(A, s) returns #{eigenvalues of A strictly below s}. Three
// kernels are available and agree wherever they overlap:
//   - Sturm sequence for tridiagonal matrices,
//   - sparse LDL^T (fill-reducing symmetric permutation) for general sparsity,
//   - dense symmetric eigensolver, for dimension <= dense_limit.
// By Sylvester's law the number of negative pivots of A - sI equals the
// number of eigenvalues below s. A pivot with |d| < pivot_tol * scale means an
// eigenvalue may sit on the boundary; the count is then re-evaluated at s -+ delta
// and, if those disagree, the result is flagged ambiguous with both counts.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/OrderingMethods>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>

#include "assembly.hpp"

namespace smilansky {

enum class CountMethod { automatic, sturm, sparse_ldlt, dense };

inline const char* name_of(CountMethod m) {
    switch (m) {
    case CountMethod::automatic: return "auto";
    case CountMethod::sturm: return "sturm";
    case CountMethod::sparse_ldlt: return "sparse_ldlt";
    case CountMethod::dense: return "dense";
    }
    return "?";
}

struct CountOptions {
    CountMethod method = CountMethod::automatic;
    double pivot_tol = 1e-11;
    std::int64_t dense_limit = 2000;
};

struct InertiaCount {
    std::int64_t count = 0;
    bool ambiguous = false;
    std::int64_t count_low = 0;  // eigenvalues below shift - delta
    std::int64_t count_high = 0; // eigenvalues below shift + delta
    CountMethod method = CountMethod::automatic;

    static InertiaCount exact(std::int64_t c, CountMethod m) { return {c, false, c, c, m}; }
};

namespace detail {

struct PivotScan {
    std::int64_t negatives = 0;
    bool tiny = false;
    bool failed = false;
};

inline PivotScan sturm_scan(const Tridiagonal& t, double shift, double tiny_abs) {
    PivotScan r;
    const std::size_t n = t.diagonal.size();
    double d = 1.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double b2 = i == 0 ? 0.0 : t.off_diagonal[i - 1] * t.off_diagonal[i - 1];
        d = (t.diagonal[i] - shift) - (i == 0 ? 0.0 : b2 / d);
        if (std::abs(d) < tiny_abs) {
            r.tiny = true;
            // keep the sign information of d; an exact zero is nudged off the axis
            if (d == 0.0)
                d = tiny_abs;
        }
        if (d < 0.0)
            ++r.negatives;
    }
    return r;
}

inline PivotScan ldlt_scan(const Eigen::SparseMatrix<double>& a, double shift, double tiny_abs) {
    PivotScan r;
    Eigen::SparseMatrix<double> shifted = a;
    if (shift != 0.0) {
        Eigen::SparseMatrix<double> id(a.rows(), a.cols());
        id.setIdentity();
        shifted = a - shift * id;
    }
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>, Eigen::Lower, Eigen::AMDOrdering<int>> ldlt;
    ldlt.compute(shifted);
    if (ldlt.info() != Eigen::Success) {
        r.failed = true;
        r.tiny = true;
        return r;
    }
    const Eigen::VectorXd d = ldlt.vectorD();
    for (Eigen::Index i = 0; i < d.size(); ++i) {
        if (!std::isfinite(d[i])) {
            r.failed = true;
            r.tiny = true;
            return r;
        }
        if (std::abs(d[i]) < tiny_abs)
            r.tiny = true;
        if (d[i] < 0.0)
            ++r.negatives;
    }
    return r;
}

/// Re-count at shift -+ delta, widening delta until both sides are clean.
template <class Scan>
InertiaCount bracket_count(Scan&& scan, double shift, double scale, double pivot_tol, CountMethod method) {
    double delta = 1e3 * pivot_tol * scale;
    for (int attempt = 0; attempt < 6; ++attempt, delta *= 10.0) {
        const PivotScan lo = scan(shift - delta);
        const PivotScan hi = scan(shift + delta);
        if (lo.tiny || hi.tiny)
            continue;
        return {lo.negatives, lo.negatives != hi.negatives, lo.negatives, hi.negatives, method};
    }
    throw std::runtime_error("inertia count: could not find a pivot-safe shift near the requested boundary");
}

inline double operator_scale(const AssembledOperator& op, double shift) {
    return std::max(op.max_abs_row_sum() + std::abs(shift), 1e-300);
}

} // namespace detail

inline InertiaCount sturm_count(const Tridiagonal& t, double shift, double pivot_tol = 1e-11, double scale = 0.0) {
    if (scale <= 0.0) {
        scale = std::abs(shift);
        for (std::size_t i = 0; i < t.diagonal.size(); ++i) {
            double row = std::abs(t.diagonal[i]);
            if (i > 0)
                row += std::abs(t.off_diagonal[i - 1]);
            if (i + 1 < t.diagonal.size())
                row += std::abs(t.off_diagonal[i]);
            scale = std::max(scale, row + std::abs(shift));
        }
        scale = std::max(scale, 1e-300);
    }
    const double tiny_abs = pivot_tol * scale;
    const auto first = detail::sturm_scan(t, shift, tiny_abs);
    if (!first.tiny)
        return InertiaCount::exact(first.negatives, CountMethod::sturm);
    return detail::bracket_count([&](double s) { return detail::sturm_scan(t, s, tiny_abs); }, shift, scale, pivot_tol,
                                 CountMethod::sturm);
}

inline InertiaCount dense_count(const Eigen::MatrixXd& a, double shift, double pivot_tol = 1e-11) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success)
        throw std::runtime_error("dense eigensolver failed to converge");
    const Eigen::VectorXd& w = es.eigenvalues();
    const double scale = std::max(a.cwiseAbs().rowwise().sum().maxCoeff() + std::abs(shift), 1e-300);
    const double tol = pivot_tol * scale;
    std::int64_t below = 0, low = 0, high = 0;
    for (Eigen::Index i = 0; i < w.size(); ++i) {
        below += w[i] < shift;
        low += w[i] < shift - tol;
        high += w[i] < shift + tol;
    }
    return {below, low != high, low, high, CountMethod::dense};
}

inline InertiaCount sparse_ldlt_count(const Eigen::SparseMatrix<double>& a, double shift, double pivot_tol = 1e-11,
                                      double scale = 0.0) {
    if (scale <= 0.0) {
        scale = std::abs(shift);
        for (int k = 0; k < a.outerSize(); ++k) {
            double col = 0.0;
            for (Eigen::SparseMatrix<double>::InnerIterator it(a, k); it; ++it)
                col += std::abs(it.value());
            scale = std::max(scale, col + std::abs(shift));
        }
        scale = std::max(scale, 1e-300);
    }
    const double tiny_abs = pivot_tol * scale;
    const auto first = detail::ldlt_scan(a, shift, tiny_abs);
    if (!first.tiny)
        return InertiaCount::exact(first.negatives, CountMethod::sparse_ldlt);
    return detail::bracket_count([&](double s) { return detail::ldlt_scan(a, s, tiny_abs); }, shift, scale, pivot_tol,
                                 CountMethod::sparse_ldlt);
}

/// Number of eigenvalues of `op` strictly below `shift`.
inline InertiaCount count_negative(const AssembledOperator& op, double shift, const CountOptions& opts = {}) {
    if (op.dimension() == 0)
        return InertiaCount::exact(0, CountMethod::automatic);
    CountMethod method = opts.method;
    if (method == CountMethod::automatic)
        method = op.is_tridiagonal() ? CountMethod::sturm : CountMethod::sparse_ldlt;
    const double scale = detail::operator_scale(op, shift);
    switch (method) {
    case CountMethod::sturm: {
        const auto t = op.tridiagonal();
        if (!t)
            throw DomainError("Sturm counting requested for a non-tridiagonal operator");
        return sturm_count(*t, shift, opts.pivot_tol, scale);
    }
    case CountMethod::dense:
        if (op.dimension() > opts.dense_limit)
            throw DomainError("dense counting limited to dimension " + std::to_string(opts.dense_limit));
        return dense_count(op.to_dense(), shift, opts.pivot_tol);
    case CountMethod::sparse_ldlt:
    case CountMethod::automatic:
        break;
    }
    auto r = sparse_ldlt_count(op.to_sparse(), shift, opts.pivot_tol, scale);
    // The factorization is pivot-free inside the fill-reducing order; small
    // problems that still look ambiguous are settled by the eigensolver.
    if (r.ambiguous && op.dimension() <= opts.dense_limit)
        r = dense_count(op.to_dense(), shift, opts.pivot_tol);
    return r;
}

/// Lanczos with full reorthogonalization. Returns Ritz values in increasing
/// order; the extreme ones converge first. Used for diagnostics only.
inline std::vector<double> lanczos_ritz_values(const AssembledOperator& op, int steps, std::uint64_t seed = 20050518) {
    const auto n = op.dimension();
    if (n == 0)
        return {};
    if (n <= steps || n <= 64) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(op.to_dense(), Eigen::EigenvaluesOnly);
        const Eigen::VectorXd w = es.eigenvalues();
        return {w.data(), w.data() + w.size()};
    }
    const auto a = op.to_sparse();
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    Eigen::MatrixXd q(n, steps + 1);
    Eigen::VectorXd v(n);
    for (Eigen::Index i = 0; i < n; ++i)
        v[i] = normal(rng);
    q.col(0) = v.normalized();
    std::vector<double> alpha, beta;
    int k = 0;
    for (; k < steps; ++k) {
        Eigen::VectorXd w = a * q.col(k);
        alpha.push_back(q.col(k).dot(w));
        // two passes of classical Gram-Schmidt
        for (int pass = 0; pass < 2; ++pass)
            w -= q.leftCols(k + 1) * (q.leftCols(k + 1).transpose() * w);
        const double b = w.norm();
        if (b < 1e-12 * std::max(1.0, std::abs(alpha.back()))) {
            ++k;
            break;
        }
        beta.push_back(b);
        q.col(k + 1) = w / b;
    }
    const int m = static_cast<int>(alpha.size());
    Eigen::MatrixXd t = Eigen::MatrixXd::Zero(m, m);
    for (int i = 0; i < m; ++i) {
        t(i, i) = alpha[static_cast<std::size_t>(i)];
        if (i + 1 < m) {
            t(i, i + 1) = beta[static_cast<std::size_t>(i)];
            t(i + 1, i) = beta[static_cast<std::size_t>(i)];
        }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(t, Eigen::EigenvaluesOnly);
    const Eigen::VectorXd w = es.eigenvalues();
    return {w.data(), w.data() + w.size()};
}

inline double lanczos_smallest(const AssembledOperator& op, int steps = 80) {
    const auto w = lanczos_ritz_values(op, steps);
    return w.empty() ? 0.0 : w.front();
}

} // namespace smilansky
