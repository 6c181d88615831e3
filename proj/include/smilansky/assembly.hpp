#pragma once

// Truncated lattice operators of the coefficient-space reduction.
//
// In the orthonormal F_gamma basis a state is a coefficient vector C and
//   b'_+[C] = sum sqrt(2m) / (rho_hat_{m,n} rho_hat_{m-1,n}) w^+_{m,n} w^+_{m-1,n},
//   w^+_{m,n} = C^+_{m,n} - kappa_{m,n} C^-_{m,n},
// with the mirror formula (n-direction, w^-) for b'_-. An operator B is stored
// so that C^T B C equals the form, i.e. each off-diagonal matrix entry carries
// half the form coefficient. Couplings that leave the lattice are dropped.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <initializer_list>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "lattice.hpp"
#include "model.hpp"

namespace smilansky {

enum class OperatorKind {
    b_prime_plus,
    b_prime_minus,
    b_doubleprime_plus,
    b_doubleprime_minus,
    total,
    remainder,
    one_oscillator,
    birman_schwinger,
    generic,
};

inline const char* name_of(OperatorKind k) {
    switch (k) {
    case OperatorKind::b_prime_plus: return "B'+";
    case OperatorKind::b_prime_minus: return "B'-";
    case OperatorKind::b_doubleprime_plus: return "B''+";
    case OperatorKind::b_doubleprime_minus: return "B''-";
    case OperatorKind::total: return "I+a+B'++a-B'-";
    case OperatorKind::remainder: return "X";
    case OperatorKind::one_oscillator: return "J";
    case OperatorKind::birman_schwinger: return "K";
    case OperatorKind::generic: return "generic";
    }
    return "?";
}

struct MatrixEntry {
    std::int64_t row = 0; // row <= col
    std::int64_t col = 0;
    double value = 0.0;
};

struct OperatorInfo {
    OperatorKind kind = OperatorKind::generic;
    ModelParams params{};
    std::optional<Truncation> truncation; // absent for one-oscillator operators
    double energy = 0.0;                  // gamma = sqrt(r - energy)
};

struct Tridiagonal {
    std::vector<double> diagonal;
    std::vector<double> off_diagonal; // off_diagonal[i] couples i and i+1
};

/// Real symmetric sparse matrix stored as one entry per unordered pair,
/// sorted by (row, col). Immutable once built.
class AssembledOperator {
public:
    AssembledOperator() = default;

    /// Entries may arrive unsorted, in either triangle and with duplicates; they are summed.
    AssembledOperator(std::int64_t dimension, std::vector<MatrixEntry> entries, OperatorInfo info)
        : dim_(dimension), info_(std::move(info)) {
        for (auto& e : entries)
            if (e.row > e.col)
                std::swap(e.row, e.col);
        std::sort(entries.begin(), entries.end(), [](const MatrixEntry& a, const MatrixEntry& b) {
            return a.row != b.row ? a.row < b.row : a.col < b.col;
        });
        entries_.reserve(entries.size());
        for (const auto& e : entries) {
            if (e.row < 0 || e.col >= dim_)
                throw DomainError("matrix entry outside the operator dimension");
            if (!entries_.empty() && entries_.back().row == e.row && entries_.back().col == e.col)
                entries_.back().value += e.value;
            else
                entries_.push_back(e);
        }
        std::erase_if(entries_, [](const MatrixEntry& e) { return e.value == 0.0; });
    }

    std::int64_t dimension() const { return dim_; }
    const std::vector<MatrixEntry>& entries() const { return entries_; }
    const OperatorInfo& info() const { return info_; }
    std::size_t nonzeros() const { return entries_.size(); }

    double quadratic_form(const Eigen::VectorXd& c) const {
        double s = 0.0;
        for (const auto& e : entries_)
            s += (e.row == e.col ? 1.0 : 2.0) * e.value * c[e.row] * c[e.col];
        return s;
    }

    Eigen::VectorXd apply(const Eigen::VectorXd& x) const {
        Eigen::VectorXd y = Eigen::VectorXd::Zero(dim_);
        for (const auto& e : entries_) {
            y[e.row] += e.value * x[e.col];
            if (e.row != e.col)
                y[e.col] += e.value * x[e.row];
        }
        return y;
    }

    /// Full symmetric storage (both triangles), optionally with -shift on the diagonal.
    Eigen::SparseMatrix<double> to_sparse(double shift = 0.0) const {
        std::vector<Eigen::Triplet<double>> t;
        t.reserve(2 * entries_.size() + static_cast<std::size_t>(dim_));
        for (const auto& e : entries_) {
            t.emplace_back(e.row, e.col, e.value);
            if (e.row != e.col)
                t.emplace_back(e.col, e.row, e.value);
        }
        if (shift != 0.0)
            for (std::int64_t i = 0; i < dim_; ++i)
                t.emplace_back(i, i, -shift);
        Eigen::SparseMatrix<double> a(dim_, dim_);
        a.setFromTriplets(t.begin(), t.end());
        a.makeCompressed();
        return a;
    }

    Eigen::MatrixXd to_dense() const {
        Eigen::MatrixXd a = Eigen::MatrixXd::Zero(dim_, dim_);
        for (const auto& e : entries_) {
            a(e.row, e.col) = e.value;
            a(e.col, e.row) = e.value;
        }
        return a;
    }

    double max_abs_entry() const {
        double m = 0.0;
        for (const auto& e : entries_)
            m = std::max(m, std::abs(e.value));
        return m;
    }

    /// Infinity norm; bounds the spectral radius.
    double max_abs_row_sum() const {
        std::vector<double> rows(static_cast<std::size_t>(dim_), 0.0);
        for (const auto& e : entries_) {
            rows[e.row] += std::abs(e.value);
            if (e.row != e.col)
                rows[e.col] += std::abs(e.value);
        }
        return rows.empty() ? 0.0 : *std::max_element(rows.begin(), rows.end());
    }

    std::vector<std::size_t> row_nonzeros() const {
        std::vector<std::size_t> rows(static_cast<std::size_t>(dim_), 0);
        for (const auto& e : entries_) {
            ++rows[e.row];
            if (e.row != e.col)
                ++rows[e.col];
        }
        return rows;
    }

    bool is_tridiagonal() const {
        return std::all_of(entries_.begin(), entries_.end(), [](const MatrixEntry& e) { return e.col - e.row <= 1; });
    }

    std::optional<Tridiagonal> tridiagonal() const {
        if (!is_tridiagonal())
            return std::nullopt;
        Tridiagonal t;
        t.diagonal.assign(static_cast<std::size_t>(dim_), 0.0);
        t.off_diagonal.assign(dim_ > 0 ? static_cast<std::size_t>(dim_ - 1) : 0, 0.0);
        for (const auto& e : entries_) {
            if (e.row == e.col)
                t.diagonal[e.row] = e.value;
            else
                t.off_diagonal[e.row] = e.value;
        }
        return t;
    }

private:
    std::int64_t dim_ = 0;
    std::vector<MatrixEntry> entries_;
    OperatorInfo info_;
};

inline AssembledOperator identity_operator(std::int64_t dim, OperatorInfo info = {}) {
    std::vector<MatrixEntry> e;
    e.reserve(static_cast<std::size_t>(dim));
    for (std::int64_t i = 0; i < dim; ++i)
        e.push_back({i, i, 1.0});
    return AssembledOperator(dim, std::move(e), std::move(info));
}

/// sum_k scale_k * op_k over operators of equal dimension.
inline AssembledOperator linear_combination(std::initializer_list<std::pair<double, const AssembledOperator*>> terms,
                                            OperatorInfo info) {
    std::int64_t dim = -1;
    std::vector<MatrixEntry> all;
    for (const auto& [scale, op] : terms) {
        if (dim >= 0 && op->dimension() != dim)
            throw DomainError("linear_combination: dimension mismatch");
        dim = op->dimension();
        if (scale == 0.0)
            continue;
        for (const auto& e : op->entries())
            all.push_back({e.row, e.col, scale * e.value});
    }
    return AssembledOperator(std::max<std::int64_t>(dim, 0), std::move(all), std::move(info));
}

namespace detail {

struct LatticeScalars {
    Lattice lattice;
    std::vector<double> kappa;
    std::vector<double> rho_hat;
};

inline LatticeScalars lattice_scalars(const ModelParams& params, const Truncation& trunc, double energy) {
    params.validate();
    LatticeScalars s{Lattice(trunc), {}, {}};
    s.kappa.reserve(s.lattice.size());
    s.rho_hat.reserve(s.lattice.size());
    for (const auto c : s.lattice.channels()) {
        const double radicand = channel_energy(c.m, c.n, params) - energy;
        if (!(radicand > 0.0))
            throw DomainError("channel (" + std::to_string(c.m) + "," + std::to_string(c.n) +
                              ") is open at energy " + std::to_string(energy) +
                              (c.m == 0 && c.n == 0 ? " (exclude the origin channel at the threshold)" : ""));
        const double g = std::sqrt(radicand);
        s.kappa.push_back(kappa(g));
        s.rho_hat.push_back(rho_hat(g));
    }
    return s;
}

/// Entries of b'_side (full) or b''_side (leading part only).
inline std::vector<MatrixEntry> coupling_entries(const LatticeScalars& s, Side side, bool leading_only) {
    std::vector<MatrixEntry> out;
    const Side own = side;
    const Side cross = other(side);
    const auto& lat = s.lattice;
    for (std::size_t i = 0; i < lat.size(); ++i) {
        const ChannelIndex c = lat.channel(i);
        const int k = side == Side::plus ? c.m : c.n;
        if (k == 0)
            continue;
        const ChannelIndex nb = side == Side::plus ? ChannelIndex{c.m - 1, c.n} : ChannelIndex{c.m, c.n - 1};
        const auto j = lat.index_of(nb);
        if (!j)
            continue;
        const double half = 0.5 * std::sqrt(2.0 * k) / (s.rho_hat[i] * s.rho_hat[*j]);
        const auto a = [&](Side comp) { return static_cast<std::int64_t>(Lattice::dof(i, comp)); };
        const auto b = [&](Side comp) { return static_cast<std::int64_t>(Lattice::dof(*j, comp)); };
        out.push_back({a(own), b(own), half});
        if (leading_only)
            continue;
        out.push_back({a(own), b(cross), -s.kappa[*j] * half});
        out.push_back({a(cross), b(own), -s.kappa[i] * half});
        out.push_back({a(cross), b(cross), s.kappa[i] * s.kappa[*j] * half});
    }
    return out;
}

inline OperatorKind prime_kind(Side side, bool leading_only) {
    if (leading_only)
        return side == Side::plus ? OperatorKind::b_doubleprime_plus : OperatorKind::b_doubleprime_minus;
    return side == Side::plus ? OperatorKind::b_prime_plus : OperatorKind::b_prime_minus;
}

} // namespace detail

/// Matrix of b'_+ or b'_- on the lattice, gamma_{m,n} = sqrt(r_{m,n} - energy).
inline AssembledOperator assemble_b_prime(const ModelParams& params, const Truncation& trunc, Side side, double energy) {
    const auto s = detail::lattice_scalars(params, trunc, energy);
    return AssembledOperator(static_cast<std::int64_t>(s.lattice.dofs()), detail::coupling_entries(s, side, false),
                             {detail::prime_kind(side, false), params, trunc, energy});
}

/// Leading part b''_+/-: the kappa terms removed, coupling C^+ <-> C^+ (or C^- <-> C^-) only.
inline AssembledOperator assemble_b_doubleprime(const ModelParams& params, const Truncation& trunc, Side side,
                                                double energy) {
    const auto s = detail::lattice_scalars(params, trunc, energy);
    return AssembledOperator(static_cast<std::int64_t>(s.lattice.dofs()), detail::coupling_entries(s, side, true),
                             {detail::prime_kind(side, true), params, trunc, energy});
}

/// I + alpha_+ B'_+ + alpha_- B'_-.
inline AssembledOperator assemble_total(const ModelParams& params, const Truncation& trunc, double energy) {
    const auto s = detail::lattice_scalars(params, trunc, energy);
    std::vector<MatrixEntry> all;
    const auto dim = static_cast<std::int64_t>(s.lattice.dofs());
    all.reserve(static_cast<std::size_t>(dim) * 5);
    for (std::int64_t i = 0; i < dim; ++i)
        all.push_back({i, i, 1.0});
    for (const Side side : {Side::plus, Side::minus}) {
        const double a = params.alpha(side);
        if (a == 0.0)
            continue;
        for (auto e : detail::coupling_entries(s, side, false)) {
            e.value *= a;
            all.push_back(e);
        }
    }
    return AssembledOperator(dim, std::move(all), {OperatorKind::total, params, trunc, energy});
}

/// X = alpha_+ (B'_+ - B''_+ (+) 0) + alpha_- (B'_- - 0 (+) B''_-).
inline AssembledOperator assemble_remainder(const ModelParams& params, const Truncation& trunc, double energy) {
    const auto s = detail::lattice_scalars(params, trunc, energy);
    std::vector<MatrixEntry> all;
    for (const Side side : {Side::plus, Side::minus}) {
        const double a = params.alpha(side);
        if (a == 0.0)
            continue;
        for (auto e : detail::coupling_entries(s, side, false)) {
            e.value *= a;
            all.push_back(e);
        }
        for (auto e : detail::coupling_entries(s, side, true)) {
            e.value *= -a;
            all.push_back(e);
        }
    }
    return AssembledOperator(static_cast<std::int64_t>(s.lattice.dofs()), std::move(all),
                             {OperatorKind::remainder, params, trunc, energy});
}

/// Lowest channel of the one-oscillator lattice: m = 0 is degenerate (gamma_0 = 0)
/// exactly at the threshold nu^2/2 and is dropped there.
inline int one_oscillator_first_channel(double nu, double energy) {
    return energy >= nu * nu * 0.5 ? 1 : 0;
}

/// Jacobi matrix J of the single-oscillator problem on channels m = first..size:
/// zero diagonal, J_{m,m-1} = c_m / 2 with c_m = sqrt(2m) / (rho_m rho_{m-1}),
/// rho_m = sqrt(2 gamma_m), gamma_m = sqrt(nu^2 (m + 1/2) - energy).
inline AssembledOperator assemble_one_oscillator(double alpha, double nu, int size, double energy) {
    if (!(nu > 0.0) || !(alpha >= 0.0))
        throw DomainError("one-oscillator operator needs nu > 0 and alpha >= 0");
    if (energy > nu * nu * 0.5)
        throw DomainError("one-oscillator energy must not exceed the threshold nu^2/2");
    const int first = one_oscillator_first_channel(nu, energy);
    if (size < first)
        throw DomainError("one-oscillator size must be at least the first channel index");
    const auto dim = static_cast<std::int64_t>(size - first + 1);
    std::vector<double> rho_m(static_cast<std::size_t>(dim));
    for (int m = first; m <= size; ++m) {
        const double radicand = nu * nu * (m + 0.5) - energy;
        if (!(radicand > 0.0))
            throw DomainError("one-oscillator channel " + std::to_string(m) + " is open at this energy");
        rho_m[static_cast<std::size_t>(m - first)] = std::sqrt(2.0 * std::sqrt(radicand));
    }
    std::vector<MatrixEntry> e;
    e.reserve(static_cast<std::size_t>(dim));
    for (int m = first + 1; m <= size; ++m) {
        const auto i = static_cast<std::int64_t>(m - first);
        const double c = std::sqrt(2.0 * m) / (rho_m[static_cast<std::size_t>(i)] * rho_m[static_cast<std::size_t>(i - 1)]);
        e.push_back({i - 1, i, 0.5 * c});
    }
    OperatorInfo info{OperatorKind::one_oscillator, ModelParams{alpha, 0.0, nu, 1.0}, std::nullopt, energy};
    return AssembledOperator(dim, std::move(e), std::move(info));
}

/// I + alpha J for the single-oscillator problem.
inline AssembledOperator assemble_one_oscillator_total(double alpha, double nu, int size, double energy) {
    const auto j = assemble_one_oscillator(alpha, nu, size, energy);
    const auto id = identity_operator(j.dimension());
    return linear_combination({{1.0, &id}, {alpha, &j}}, j.info());
}

/// Debug dump: "row col value" per unordered pair, sorted, 17 significant digits.
inline void dump(const AssembledOperator& op, std::ostream& os) {
    char buf[96];
    for (const auto& e : op.entries()) {
        std::snprintf(buf, sizeof buf, "%lld %lld %.17g\n", static_cast<long long>(e.row),
                      static_cast<long long>(e.col), e.value);
        os << buf;
    }
}

} // namespace smilansky
