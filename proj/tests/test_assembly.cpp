#include <cmath>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "smilansky/assembly.hpp"

using namespace smilansky;

namespace {

const ModelParams unit{1.0, 1.0, 1.0, 1.0};

/// Permutation matrix of (m, n, +/-) -> (n, m, -/+).
Eigen::MatrixXd mirror_dense(const Eigen::MatrixXd& a, const Truncation& t) {
    const Lattice lat(t), mir(t.mirrored());
    const auto n = a.rows();
    std::vector<Eigen::Index> to(static_cast<std::size_t>(n));
    for (std::size_t i = 0; i < lat.size(); ++i) {
        const auto c = lat.channel(i);
        const auto j = *mir.index_of({c.n, c.m});
        for (const Side s : {Side::plus, Side::minus})
            to[Lattice::dof(i, s)] = static_cast<Eigen::Index>(Lattice::dof(j, other(s)));
    }
    Eigen::MatrixXd b = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index r = 0; r < n; ++r)
        for (Eigen::Index c = 0; c < n; ++c)
            b(to[r], to[c]) = a(r, c);
    return b;
}

} // namespace

TEST(Lattice, OrderingAndIndex) {
    const Lattice lat(Truncation::simplex(3));
    ASSERT_EQ(lat.size(), 9u);
    EXPECT_EQ(lat.channel(0), (ChannelIndex{0, 1}));
    EXPECT_EQ(lat.channel(1), (ChannelIndex{1, 0}));
    EXPECT_EQ(lat.channel(2), (ChannelIndex{0, 2}));
    for (std::size_t i = 0; i < lat.size(); ++i)
        EXPECT_EQ(*lat.index_of(lat.channel(i)), i);
    EXPECT_FALSE(lat.index_of({0, 0}));
    EXPECT_FALSE(lat.index_of({2, 2}));
    const Lattice rect(Truncation::rectangle(2, 1, true));
    EXPECT_EQ(rect.size(), 6u);
    for (std::size_t i = 0; i < rect.size(); ++i)
        EXPECT_EQ(*rect.index_of(rect.channel(i)), i);
    EXPECT_THROW(Lattice(Truncation::simplex(0)), DomainError);
}

TEST(BPrime, TwoChannelLatticeIsZero) {
    const auto b = assemble_b_prime(unit, Truncation::simplex(1), Side::plus, unit.threshold());
    EXPECT_EQ(b.dimension(), 4);
    EXPECT_EQ(b.nonzeros(), 0u);
    EXPECT_EQ(b.to_dense(), Eigen::MatrixXd::Zero(4, 4));
}

TEST(BPrime, LeadingEntryOnL2) {
    const auto t = Truncation::simplex(2);
    const Lattice lat(t);
    const auto i = static_cast<Eigen::Index>(Lattice::dof(*lat.index_of({2, 0}), Side::plus));
    const auto j = static_cast<Eigen::Index>(Lattice::dof(*lat.index_of({1, 0}), Side::plus));
    const auto bp = assemble_b_prime(unit, t, Side::plus, 1.0).to_dense();
    EXPECT_NEAR(bp(i, j), 0.41929666579097791, 1e-14);
    EXPECT_NEAR(bp(i, j), 0.5 * 2.0 / (oracle::rho_hat_literal(1.0) * oracle::rho_hat_literal(std::sqrt(2.0))), 1e-14);
    const auto bpp = assemble_b_doubleprime(unit, t, Side::plus, 1.0);
    std::size_t off = 0;
    for (const auto& e : bpp.entries())
        off += e.row != e.col;
    EXPECT_EQ(off, 2u); // (1,0)-(0,0) is excluded; (2,0)-(1,0) and (1,1)-(0,1)
    EXPECT_NEAR(bpp.to_dense()(i, j), 0.41929666579097791, 1e-14);
}

TEST(BPrime, NoPlusCouplingsOnColumnLattice) {
    const auto b = assemble_b_prime(unit, Truncation::rectangle(0, 5), Side::plus, 1.0);
    EXPECT_EQ(b.nonzeros(), 0u);
    const auto bpp = assemble_b_doubleprime(unit, Truncation::rectangle(0, 5), Side::plus, 1.0);
    EXPECT_EQ(bpp.nonzeros(), 0u);
}

TEST(BPrime, SwapCovarianceExact) {
    const ModelParams p{0.9, 0.4, 1.3, 0.8};
    for (const auto t : {Truncation::simplex(5), Truncation::rectangle(4, 3), Truncation::simplex(4, true)}) {
        const double e = t.include_origin ? 0.5 : p.threshold();
        const auto plus = assemble_b_prime(p, t, Side::plus, e).to_dense();
        const auto minus = assemble_b_prime(p.swapped(), t.mirrored(), Side::minus, e).to_dense();
        EXPECT_EQ(mirror_dense(plus, t), minus);
    }
}

TEST(BPrime, FormMatrixDuality) {
    std::mt19937_64 rng(17);
    std::normal_distribution<double> c;
    const ModelParams p{0.8, 1.1, 1.0, 1.2};
    const auto t = Truncation::simplex(6);
    const double e = p.threshold();
    const auto bp = assemble_b_prime(p, t, Side::plus, e);
    const auto bm = assemble_b_prime(p, t, Side::minus, e);
    const auto total = assemble_total(p, t, e);
    for (int k = 0; k < 100; ++k) {
        Eigen::VectorXd v(total.dimension());
        for (auto& x : v)
            x = c(rng);
        const double fp = oracle::b_prime_form(p, t, Side::plus, e, v);
        const double fm = oracle::b_prime_form(p, t, Side::minus, e, v);
        EXPECT_NEAR(bp.quadratic_form(v), fp, 1e-12 * (1 + std::abs(fp)));
        EXPECT_NEAR(bm.quadratic_form(v), fm, 1e-12 * (1 + std::abs(fm)));
        const double expected = v.squaredNorm() + p.alpha_plus * fp + p.alpha_minus * fm;
        EXPECT_NEAR(total.quadratic_form(v), expected, 1e-12 * std::abs(expected));
        EXPECT_NEAR(v.dot(total.apply(v)), total.quadratic_form(v), 1e-11 * std::abs(expected));
    }
}

TEST(BPrime, Sparsity) {
    const auto t = Truncation::simplex(12);
    const Lattice lat(t);
    for (const Side s : {Side::plus, Side::minus}) {
        const auto b = assemble_b_prime(unit, t, s, 1.0);
        const auto bb = assemble_b_doubleprime(unit, t, s, 1.0);
        EXPECT_LE(b.nonzeros(), 8 * lat.size());
        EXPECT_LE(bb.nonzeros(), 2 * lat.size());
        for (const auto r : b.row_nonzeros())
            EXPECT_LE(r, 8u);
        for (const auto r : bb.row_nonzeros())
            EXPECT_LE(r, 2u);
        for (const auto& e : b.entries())
            EXPECT_LE(e.row, e.col);
    }
}

TEST(Total, IdentityCases) {
    const auto id = assemble_total({0, 0, 1, 1}, Truncation::simplex(4), 1.0);
    EXPECT_EQ(id.to_dense(), Eigen::MatrixXd::Identity(id.dimension(), id.dimension()));
    const auto l1 = assemble_total({1.2, 0.9, 1, 1}, Truncation::simplex(1), 1.0);
    EXPECT_EQ(l1.to_dense(), Eigen::MatrixXd::Identity(4, 4));
}

TEST(Total, SwapCovarianceSpectrum) {
    const ModelParams p{1.1, 0.5, 1.0, 0.7};
    const auto t = Truncation::simplex(8);
    const auto a = oracle::sorted_eigenvalues(assemble_total(p, t, p.threshold()).to_dense());
    const auto b = oracle::sorted_eigenvalues(assemble_total(p.swapped(), t.mirrored(), p.threshold()).to_dense());
    EXPECT_LE((a - b).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(Total, BoundedBelowProxy) {
    for (const double eta : {0.0, 0.01, 0.3}) {
        const ModelParams p{std::sqrt(2.0) / (1 + eta), std::sqrt(2.0) / (1 + eta), 1.0, 1.0};
        for (const int L : {2, 8, 20, 40}) {
            const auto ev = oracle::sorted_eigenvalues(assemble_total(p, Truncation::simplex(L), 1.0).to_dense());
            EXPECT_GE(ev[0], -3.0) << eta << " " << L;
        }
    }
}

TEST(Remainder, ZeroCouplingAndKappaFactor) {
    EXPECT_EQ(assemble_remainder({0, 0, 1, 1}, Truncation::simplex(6), 1.0).nonzeros(), 0u);
    const ModelParams p{1.2, 0.7, 1.0, 1.0};
    const auto t = Truncation::simplex(10);
    const Lattice lat(t);
    const auto x = assemble_remainder(p, t, p.threshold());
    // every surviving entry touches a cross component and carries a kappa
    auto rh = [&](ChannelIndex c) { return rho_hat(channel_gamma(c.m, c.n, p, -p.threshold())); };
    double max_kappa = 0.0, max_coef = 0.0;
    for (const auto c : lat.channels()) {
        max_kappa = std::max(max_kappa, std::abs(kappa(channel_gamma(c.m, c.n, p, -p.threshold()))));
        if (c.m > 0 && lat.index_of({c.m - 1, c.n}))
            max_coef = std::max(max_coef, std::sqrt(2.0 * c.m) / (rh(c) * rh({c.m - 1, c.n})));
        if (c.n > 0 && lat.index_of({c.m, c.n - 1}))
            max_coef = std::max(max_coef, std::sqrt(2.0 * c.n) / (rh(c) * rh({c.m, c.n - 1})));
    }
    EXPECT_NEAR(max_kappa, std::abs(kappa(1.0)), 1e-15); // attained at (1,0)/(0,1)
    double max_entry = 0.0;
    for (const auto& e : x.entries())
        max_entry = std::max(max_entry, std::abs(e.value));
    EXPECT_EQ(max_entry, x.max_abs_entry());
    EXPECT_LE(max_entry, std::max(p.alpha_plus, p.alpha_minus) * max_kappa * max_coef);
    EXPECT_LE(x.max_abs_row_sum(), 4.0 * max_coef * max_kappa * std::max(p.alpha_plus, p.alpha_minus));
    // X = total - I - leading parts
    const auto total = assemble_total(p, t, p.threshold()).to_dense();
    const auto lp = assemble_b_doubleprime(p, t, Side::plus, p.threshold()).to_dense();
    const auto lm = assemble_b_doubleprime(p, t, Side::minus, p.threshold()).to_dense();
    const Eigen::MatrixXd expect =
        total - Eigen::MatrixXd::Identity(total.rows(), total.cols()) - p.alpha_plus * lp - p.alpha_minus * lm;
    EXPECT_LE((x.to_dense() - expect).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(OneOscillator, Examples) {
    const auto j = assemble_one_oscillator(1.0, 1.0, 5, 0.5);
    ASSERT_TRUE(j.is_tridiagonal());
    EXPECT_EQ(j.dimension(), 5); // m = 1..5 at the threshold
    EXPECT_NEAR(j.to_dense()(0, 1), 0.5 * 0.84089641525371454, 1e-15);
    EXPECT_NEAR(j.to_dense()(0, 1), 0.4204482, 1e-7);
    const auto big = assemble_one_oscillator(1.0, 1.0, 10000, 0.5).tridiagonal();
    EXPECT_NEAR(2.0 * big->off_diagonal.back(), 1.0 / std::sqrt(2.0), 1e-4);
    const auto one = assemble_one_oscillator(1.0, 1.0, 1, 0.5);
    EXPECT_EQ(one.dimension(), 1);
    EXPECT_EQ(one.nonzeros(), 0u);
    // below the threshold m = 0 joins the lattice
    EXPECT_EQ(assemble_one_oscillator(1.0, 1.0, 5, 0.3).dimension(), 6);
    EXPECT_THROW(assemble_one_oscillator(1.0, 1.0, 5, 0.6), DomainError);
}

TEST(Dump, SortedFullPrecision) {
    const auto b = assemble_b_prime(unit, Truncation::simplex(2), Side::plus, 1.0);
    std::ostringstream os;
    dump(b, os);
    std::istringstream in(os.str());
    long long r, c, pr = -1, pc = -1;
    double v;
    std::size_t n = 0;
    while (in >> r >> c >> v) {
        EXPECT_LE(r, c);
        EXPECT_TRUE(r > pr || (r == pr && c > pc));
        pr = r;
        pc = c;
        EXPECT_EQ(v, b.entries()[n].value); // round trip
        ++n;
    }
    EXPECT_EQ(n, b.nonzeros());
}
