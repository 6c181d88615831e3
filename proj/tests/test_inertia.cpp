#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "smilansky/assembly.hpp"
#include "smilansky/inertia.hpp"

using namespace smilansky;

namespace {

AssembledOperator from_dense(const Eigen::MatrixXd& a) {
    std::vector<MatrixEntry> e;
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = i; j < a.cols(); ++j)
            if (a(i, j) != 0.0)
                e.push_back({i, j, a(i, j)});
    return AssembledOperator(a.rows(), std::move(e), {});
}

Eigen::MatrixXd random_symmetric(std::mt19937_64& rng, int n, double density) {
    std::normal_distribution<double> c;
    std::uniform_real_distribution<double> u;
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j)
            if (i == j || u(rng) < density)
                a(i, j) = a(j, i) = c(rng);
    return a;
}

} // namespace

TEST(CountNegative, Examples) {
    EXPECT_EQ(count_negative(identity_operator(7), 0.0).count, 0);
    Eigen::MatrixXd d = Eigen::Vector3d(-1, 2, -3).asDiagonal();
    const auto op = from_dense(d);
    for (const auto m : {CountMethod::automatic, CountMethod::sturm, CountMethod::sparse_ldlt, CountMethod::dense})
        EXPECT_EQ(count_negative(op, 0.0, {m}).count, 2) << name_of(m);
}

TEST(CountNegative, RandomDenseAgreesWithEigensolver) {
    std::mt19937_64 rng(2005);
    std::normal_distribution<double> s;
    for (int trial = 0; trial < 100; ++trial) {
        const auto a = random_symmetric(rng, 50, 0.3);
        const auto op = from_dense(a);
        const auto ev = oracle::sorted_eigenvalues(a);
        for (int k = 0; k < 5; ++k) {
            double shift = s(rng) * 2.0;
            // keep the shift away from eigenvalues so the reference is unambiguous
            const double gap = (ev.array() - shift).abs().minCoeff();
            if (gap < 1e-8)
                shift += 1e-6;
            const auto expected = oracle::dense_negative_count(a, shift);
            const auto ldlt = count_negative(op, shift, {CountMethod::sparse_ldlt});
            EXPECT_EQ(ldlt.count, expected);
            EXPECT_FALSE(ldlt.ambiguous);
            EXPECT_EQ(count_negative(op, shift, {CountMethod::dense}).count, expected);
        }
    }
}

TEST(CountNegative, TridiagonalSturmAgrees) {
    std::mt19937_64 rng(77);
    std::normal_distribution<double> c;
    for (int trial = 0; trial < 50; ++trial) {
        const int n = 30 + trial;
        Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
        for (int i = 0; i < n; ++i) {
            a(i, i) = c(rng);
            if (i + 1 < n)
                a(i, i + 1) = a(i + 1, i) = c(rng);
        }
        const auto op = from_dense(a);
        ASSERT_TRUE(op.is_tridiagonal());
        for (const double shift : {-1.0, 0.0, 0.3, 1.7}) {
            const auto r = count_negative(op, shift);
            EXPECT_EQ(r.method, CountMethod::sturm);
            EXPECT_EQ(r.count, oracle::dense_negative_count(a, shift));
        }
    }
}

TEST(CountNegative, LatticeOperatorsAgreeWithDense) {
    for (const double eta : {0.3, 0.05, 0.01}) {
        const auto p = ModelParams::from_eta(eta, eta);
        for (const int L : {6, 14, 30}) {
            const auto op = assemble_total(p, Truncation::simplex(L), p.threshold());
            const auto dense = op.to_dense();
            for (const double shift : {0.0, 0.2, 1.0})
                EXPECT_EQ(count_negative(op, shift).count, oracle::dense_negative_count(dense, shift));
        }
    }
}

TEST(CountNegative, ExactBoundaryEigenvalueIsFlagged) {
    // eigenvalues -1, 0, 2: a zero pivot sits exactly at the counting boundary
    Eigen::MatrixXd d = Eigen::Vector3d(-1, 0, 2).asDiagonal();
    const auto r = count_negative(from_dense(d), 0.0, {CountMethod::sparse_ldlt});
    EXPECT_TRUE(r.ambiguous);
    EXPECT_EQ(r.count_low, 1);
    EXPECT_EQ(r.count_high, 2);
    const auto s = count_negative(from_dense(d), 0.0, {CountMethod::sturm});
    EXPECT_TRUE(s.ambiguous);
}

TEST(CountNegative, TinyPivotWithoutBoundaryEigenvalueIsResolved) {
    // [[1e-14, 1], [1, 1e-14]] has eigenvalues +-1 but a tiny first pivot
    Eigen::Matrix2d a;
    a << 1e-14, 1, 1, 1e-14;
    const auto r = count_negative(from_dense(a), 0.0, {CountMethod::sturm});
    EXPECT_EQ(r.count, 1);
    EXPECT_FALSE(r.ambiguous);
}

TEST(Lanczos, ExtremalEigenvalueMatchesDense) {
    const auto p = ModelParams::from_eta(0.05, 0.05);
    const auto op = assemble_total(p, Truncation::simplex(40), p.threshold());
    const auto ev = oracle::sorted_eigenvalues(op.to_dense());
    EXPECT_NEAR(lanczos_smallest(op, 120), ev[0], 1e-8);
    const auto a = lanczos_ritz_values(op, 30);
    const auto b = lanczos_ritz_values(op, 30);
    EXPECT_EQ(a, b); // fixed seed
}
