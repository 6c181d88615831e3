#pragma once

// Channel lattices and coefficient vectors.
//
// Ordering contract: channels are sorted lexicographically by (m + n, m);
// each channel owns two consecutive degrees of freedom, C^+ then C^-.
// Entry lists, dumps and eigenvector files rely on this order.

#include <algorithm>
#include <cassert>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "model.hpp"

namespace smilansky {

enum class Scheme { simplex, rectangle };

inline const char* name_of(Scheme s) { return s == Scheme::simplex ? "simplex" : "rectangle"; }

struct Truncation {
    Scheme scheme = Scheme::simplex;
    int L = 1;      // simplex: m + n <= L
    int M = 0;      // rectangle: m <= M
    int N = 0;      // rectangle: n <= N
    bool include_origin = false;

    bool operator==(const Truncation&) const = default;

    static Truncation simplex(int L, bool include_origin = false) {
        Truncation t;
        t.scheme = Scheme::simplex;
        t.L = L;
        t.include_origin = include_origin;
        return t;
    }

    static Truncation rectangle(int M, int N, bool include_origin = false) {
        Truncation t;
        t.scheme = Scheme::rectangle;
        t.M = M;
        t.N = N;
        t.include_origin = include_origin;
        return t;
    }

    void validate() const {
        if (scheme == Scheme::simplex && L < 1)
            throw DomainError("simplex truncation needs L >= 1");
        if (scheme == Scheme::rectangle && (M < 0 || N < 0 || (M == 0 && N == 0 && !include_origin)))
            throw DomainError("rectangle truncation needs M, N >= 0 and a non-empty lattice");
    }

    bool contains(ChannelIndex c) const {
        if (c.m < 0 || c.n < 0)
            return false;
        if (c.m == 0 && c.n == 0 && !include_origin)
            return false;
        return scheme == Scheme::simplex ? c.m + c.n <= L : (c.m <= M && c.n <= N);
    }

    /// Index mirror (m, n) -> (n, m).
    Truncation mirrored() const {
        Truncation t = *this;
        std::swap(t.M, t.N);
        return t;
    }

    Truncation with_origin(bool on) const {
        Truncation t = *this;
        t.include_origin = on;
        return t;
    }

    /// Size parameter reported as L_used (L for simplices, max(M, N) for rectangles).
    int extent() const { return scheme == Scheme::simplex ? L : std::max(M, N); }
};

class Lattice {
public:
    explicit Lattice(const Truncation& t) : trunc_(t) {
        t.validate();
        const int smax = t.scheme == Scheme::simplex ? t.L : t.M + t.N;
        if (t.scheme == Scheme::rectangle)
            table_.assign(static_cast<std::size_t>(t.M + 1) * (t.N + 1), -1);
        for (int s = 0; s <= smax; ++s) {
            for (int m = 0; m <= s; ++m) {
                const ChannelIndex c{m, s - m};
                if (!t.contains(c))
                    continue;
                if (t.scheme == Scheme::rectangle)
                    table_[static_cast<std::size_t>(c.m) * (t.N + 1) + c.n] = static_cast<std::int64_t>(channels_.size());
                channels_.push_back(c);
            }
        }
    }

    std::size_t size() const { return channels_.size(); }
    std::size_t dofs() const { return 2 * channels_.size(); }
    const Truncation& truncation() const { return trunc_; }
    const std::vector<ChannelIndex>& channels() const { return channels_; }
    ChannelIndex channel(std::size_t i) const { return channels_[i]; }

    std::optional<std::size_t> index_of(ChannelIndex c) const {
        if (!trunc_.contains(c))
            return std::nullopt;
        if (trunc_.scheme == Scheme::simplex) {
            const std::int64_t s = c.m + c.n;
            const std::int64_t idx = s * (s + 1) / 2 + c.m - (trunc_.include_origin ? 0 : 1);
            return static_cast<std::size_t>(idx);
        }
        return static_cast<std::size_t>(table_[static_cast<std::size_t>(c.m) * (trunc_.N + 1) + c.n]);
    }

    static std::size_t dof(std::size_t channel, Side component) {
        return 2 * channel + (component == Side::plus ? 0 : 1);
    }

private:
    Truncation trunc_;
    std::vector<ChannelIndex> channels_;
    std::vector<std::int64_t> table_;
};

/// Element C = {C^+_{m,n}, C^-_{m,n}} of the coefficient space over a lattice.
class CoefficientVector {
public:
    explicit CoefficientVector(std::size_t channels) : values_(Eigen::VectorXd::Zero(2 * channels)) {}
    explicit CoefficientVector(Eigen::VectorXd values) : values_(std::move(values)) {
        assert(values_.size() % 2 == 0);
    }

    std::size_t channels() const { return static_cast<std::size_t>(values_.size() / 2); }
    double& operator()(std::size_t channel, Side s) { return values_[Lattice::dof(channel, s)]; }
    double operator()(std::size_t channel, Side s) const { return values_[Lattice::dof(channel, s)]; }
    const Eigen::VectorXd& values() const { return values_; }
    Eigen::VectorXd& values() { return values_; }

private:
    Eigen::VectorXd values_;
};

} // namespace smilansky
