#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "smilansky/exp_basis.hpp"

using namespace smilansky;

namespace {

std::vector<double> gamma_grid() {
    std::vector<double> g;
    for (int i = 1; i <= 600; ++i)
        g.push_back(0.05 * i);
    return g;
}

double quad_inner(const ExpElement& a, const ExpElement& b) {
    const double g = a.gamma;
    return oracle::integrate_line(
        [&](double x) {
            // one-sided derivatives agree almost everywhere; nodes never hit +-1
            return a.derivative(x) * b.derivative(x) + g * g * a(x) * b(x);
        },
        g);
}

} // namespace

TEST(ExpElement, TraceValues) {
    const ExpElement e{0.7, 1.3, -0.4};
    const double q = std::exp(-1.4);
    EXPECT_DOUBLE_EQ(e.value_at(Side::plus), 1.3 - 0.4 * q);
    EXPECT_DOUBLE_EQ(e.value_at(Side::minus), -0.4 + 1.3 * q);
    EXPECT_NEAR(e(1.0), e.value_at(Side::plus), 1e-15);
    EXPECT_NEAR(e(-1.0), e.value_at(Side::minus), 1e-15);
}

TEST(H1Inner, Examples) {
    EXPECT_DOUBLE_EQ(h1_inner(ExpElement::u_plus(1), ExpElement::u_plus(1)), 2.0);
    EXPECT_NEAR(h1_inner(ExpElement::u_plus(1), ExpElement::u_minus(1)), 0.2706706, 1e-7);
    EXPECT_NEAR(h1_inner(ExpElement::u_plus(1), ExpElement::u_minus(1)), 2 * std::exp(-2.0), 1e-15);
    const ExpElement s{1.0, 1.0, 1.0};
    EXPECT_NEAR(h1_norm_squared(s), 4 + 4 * std::exp(-2.0), 1e-14);
    EXPECT_NEAR(h1_norm_squared(s), 4.5413411, 1e-7);
    EXPECT_THROW(h1_inner(ExpElement::u_plus(1), ExpElement::u_plus(2)), DomainError);
}

TEST(H1Inner, MatchesQuadrature) {
    std::mt19937_64 rng(5);
    std::normal_distribution<double> c;
    for (const double g : {0.3, 1.0, 2.5, 7.0}) {
        for (int i = 0; i < 5; ++i) {
            const ExpElement a{g, c(rng), c(rng)}, b{g, c(rng), c(rng)};
            const double exact = h1_inner(a, b);
            EXPECT_NEAR(exact, quad_inner(a, b), 1e-10 * (1 + std::abs(exact))) << g;
        }
    }
}

TEST(DerivativeJump, Examples) {
    const auto v = project({1.0, 0.0}, 1.0);
    EXPECT_NEAR(derivative_jump(v, Side::plus), -2.0373147207275481, 1e-14);
    // independent: one-sided derivatives of the exponentials themselves
    EXPECT_NEAR(v.derivative(1.0, true) - v.derivative(1.0, false), -2.0373147207275481, 1e-14);
    const auto u = ExpElement::u_plus(2.0);
    EXPECT_NEAR(derivative_jump(u, Side::plus), -4.0, 1e-14);
    EXPECT_NEAR(derivative_jump(u, Side::minus), 0.0, 1e-14);
}

TEST(DerivativeJump, TraceFormulaEqualsDirect) {
    std::mt19937_64 rng(9);
    std::normal_distribution<double> c;
    for (const double g : gamma_grid()) {
        const ExpElement e{g, c(rng), c(rng)};
        for (const Side p : {Side::plus, Side::minus})
            EXPECT_NEAR(derivative_jump(e, p), derivative_jump_direct(e, p),
                        1e-12 * std::max(1.0, std::abs(derivative_jump_direct(e, p))));
    }
}

TEST(Project, Examples) {
    const auto z = project({0, 0}, 1.0);
    EXPECT_EQ(z.a_plus, 0.0);
    EXPECT_EQ(z.a_minus, 0.0);
    const auto s = project({1, 1}, 1.0);
    EXPECT_NEAR(s.a_plus, 0.88079707797788244, 1e-15);
    EXPECT_NEAR(s.a_minus, 0.88079707797788244, 1e-15);
    const auto t = project({1, 0}, 1.0);
    EXPECT_NEAR(t.a_plus, 1.018657360363774, 1e-15);
    EXPECT_NEAR(t.a_minus, -0.1378602823858916, 1e-15);
}

TEST(Project, IdempotentAndPythagoras) {
    std::mt19937_64 rng(13);
    std::normal_distribution<double> c;
    for (const double g : gamma_grid()) {
        const TraceData t{c(rng), c(rng)};
        const auto p = project(t, g);
        const auto pp = project(traces(p), g);
        EXPECT_NEAR(pp.a_plus, p.a_plus, 1e-13 * (1 + std::abs(p.a_plus)));
        EXPECT_NEAR(pp.a_minus, p.a_minus, 1e-13 * (1 + std::abs(p.a_minus)));
    }
    // u outside F_gamma: e^{-gamma|x - 1|} + w e^{-2 gamma |x|}; Pythagoras by quadrature
    for (const double g : {0.4, 1.0, 3.0}) {
        const double w = 0.8;
        auto u = [&](double x) { return std::exp(-g * std::abs(x - 1)) + w * std::exp(-2 * g * std::abs(x)); };
        auto du = [&](double x) {
            const double s1 = x > 1 ? -1.0 : 1.0, s2 = x > 0 ? -1.0 : 1.0;
            return g * s1 * std::exp(-g * std::abs(x - 1)) + 2 * g * w * s2 * std::exp(-2 * g * std::abs(x));
        };
        const auto pu = project({u(1.0), u(-1.0)}, g);
        const double norm_u = oracle::integrate_line([&](double x) { return du(x) * du(x) + g * g * u(x) * u(x); }, g);
        const double diff = oracle::integrate_line(
            [&](double x) {
                const double d = du(x) - pu.derivative(x), v = u(x) - pu(x);
                return d * d + g * g * v * v;
            },
            g);
        EXPECT_NEAR(diff, norm_u - h1_norm_squared(pu), 1e-9) << g;
        EXPECT_GT(diff, 0.0);
    }
}

TEST(TraceGap, Examples) {
    EXPECT_NEAR(trace_gap(ExpElement{1.0, 1.0, 1.0}), 0.0, 1e-12);
    EXPECT_NEAR(trace_gap(ExpElement::u_plus(1.0)), 0.23403928869575702, 1e-14);
    EXPECT_GT(trace_gap(ExpElement{1.0, 1.0, -1.0}), 0.0);
}

TEST(TraceGap, InequalityOnRandomPairsAndSharpness) {
    std::mt19937_64 rng(21);
    std::normal_distribution<double> c;
    for (const double g : gamma_grid()) {
        for (int i = 0; i < 1000; ++i)
            ASSERT_GE(trace_gap(project({c(rng), c(rng)}, g)), -1e-12) << g;
        // unit-norm element of the equality subspace v(1) = v(-1)
        ExpElement e{g, 1.0, 1.0};
        e = e * (1.0 / std::sqrt(h1_norm_squared(e)));
        EXPECT_NEAR(trace_gap(e), 0.0, 1e-10) << g;
    }
}

TEST(BasisPair, Examples) {
    const auto b = basis_pair(1.0);
    EXPECT_NEAR(b.vplus_at_plus1(), 0.70547853604146288, 1e-14);
    EXPECT_NEAR(b.vplus_at_minus1(), 0.04795868205856325, 1e-14);
    // the stored vectors evaluated directly
    EXPECT_NEAR(b.plus.value_at(Side::plus), b.vplus_at_plus1(), 1e-14);
    EXPECT_NEAR(b.plus.value_at(Side::minus), b.vplus_at_minus1(), 1e-14);
    EXPECT_NEAR(b.minus.value_at(Side::minus), b.vminus_at_minus1(), 1e-14);
    EXPECT_NEAR(b.minus.value_at(Side::plus), b.vminus_at_plus1(), 1e-14);
    for (const double g : {20.0, 25.0, 30.0}) {
        const auto h = basis_pair(g);
        EXPECT_GT(h.vplus_at_minus1(), 0.0);
        EXPECT_LT(h.vplus_at_minus1(), std::exp(-2 * g));
        EXPECT_NEAR(h.vplus_at_plus1() * std::sqrt(2 * g), 1.0, 1e-12);
    }
}

TEST(BasisPair, Orthonormal) {
    for (const double g : gamma_grid()) {
        const auto b = basis_pair(g);
        EXPECT_NEAR(h1_inner(b.plus, b.plus), 1.0, 1e-10) << g;
        EXPECT_NEAR(h1_inner(b.minus, b.minus), 1.0, 1e-10) << g;
        EXPECT_NEAR(h1_inner(b.plus, b.minus), 0.0, 1e-10) << g;
    }
}

TEST(BasisPair, CombineMatchesOracleTraces) {
    std::mt19937_64 rng(4);
    std::normal_distribution<double> c;
    for (const double g : {0.1, 0.5, 1.0, 3.0, 9.0}) {
        const double cp = c(rng), cm = c(rng);
        const auto e = basis_pair(g).combine(cp, cm);
        const auto t = oracle::channel_trace(g, cp, cm);
        EXPECT_NEAR(e.value_at(Side::plus), t.at_plus, 1e-13);
        EXPECT_NEAR(e.value_at(Side::minus), t.at_minus, 1e-13);
        // u(+1) = (C+ - kappa C-) / rho_hat
        EXPECT_NEAR(e.value_at(Side::plus), (cp - kappa(g) * cm) / rho_hat(g), 1e-13);
    }
}
