#include <cmath>

#include <gtest/gtest.h>

#include "bandgap/minmax.hpp"

using namespace bandgap;
using Eigen::MatrixXcd;

namespace {

MatrixXcd diag(std::initializer_list<double> v) {
    MatrixXcd m = MatrixXcd::Zero(static_cast<Eigen::Index>(v.size()), static_cast<Eigen::Index>(v.size()));
    Eigen::Index i = 0;
    for (double x : v) {
        m(i, i) = x;
        ++i;
    }
    return m;
}

} // namespace

TEST(MinmaxCompare, Identity) {
    const MatrixXcd Q = diag({0.0, 1.0, 4.0, 9.0});
    const MatrixXcd G = MatrixXcd::Identity(4, 4);
    const auto rep = minmax_compare({Q, G, Q, G, G, {10, 10, 10, 10}});
    ASSERT_EQ(rep.size(), 4u);
    EXPECT_TRUE(rep.all_hold());
    for (std::size_t k = 0; k < 4; ++k) {
        EXPECT_EQ(rep.delta_norm[k], 0.0);
        EXPECT_NEAR(rep.delta_form[k], 0.0, 1e-12);
        EXPECT_NEAR(rep.lambda_prime[k], rep.lambda[k], 1e-12);
    }
}

TEST(MinmaxCompare, IsometricEmbedding) {
    const MatrixXcd Q = diag({0.0, 2.0, 5.0});
    const MatrixXcd G = MatrixXcd::Identity(3, 3);
    const MatrixXcd Qp = diag({0.0, 2.0, 5.0, 100.0, 200.0});
    const MatrixXcd Gp = MatrixXcd::Identity(5, 5);
    MatrixXcd Phi = MatrixXcd::Zero(5, 3);
    Phi.topRows(3) = MatrixXcd::Identity(3, 3);
    const auto rep = minmax_compare({Q, G, Qp, Gp, Phi, {6, 6, 6}});
    EXPECT_TRUE(rep.all_hold());
    for (std::size_t k = 0; k < 3; ++k) EXPECT_NEAR(rep.lambda_prime[k], rep.lambda[k], 1e-12);
}

TEST(MinmaxCompare, NormIncreasing) {
    const MatrixXcd Q = diag({0.0, 1.0, 3.0});
    const MatrixXcd G = MatrixXcd::Identity(3, 3);
    const MatrixXcd Phi = 2.0 * MatrixXcd::Identity(3, 3);
    const auto rep = minmax_compare({Q, G, Q, G, Phi, {5, 5, 5}});
    for (std::size_t k = 0; k < 3; ++k) {
        EXPECT_TRUE(rep.norm_increasing[k]);
        EXPECT_EQ(rep.delta_norm[k], 0.0);
        EXPECT_NEAR(rep.delta_form[k], 3.0 * rep.lambda[k], 1e-12);
    }
    EXPECT_TRUE(rep.all_hold());
}

TEST(MinmaxCompare, ShrinkingNormCostsDelta) {
    const MatrixXcd Q = diag({1.0, 2.0});
    const MatrixXcd G = MatrixXcd::Identity(2, 2);
    const MatrixXcd Phi = 0.9 * MatrixXcd::Identity(2, 2);
    const auto rep = minmax_compare({Q, G, Q, G, Phi, {3, 3}});
    EXPECT_FALSE(rep.norm_increasing[0]);
    EXPECT_NEAR(rep.delta_norm[0], 0.19, 1e-12);
    EXPECT_NEAR(rep.delta_norm[1], 0.38, 1e-12);
    EXPECT_TRUE(rep.all_hold());
    for (std::size_t k = 0; k < 2; ++k)
        EXPECT_NEAR(rep.delta[k], 3.0 * rep.delta_norm[k] / (1.0 - rep.delta_norm[k]), 1e-12);
}

TEST(MinmaxCompare, NotApplicable) {
    const MatrixXcd Q = diag({0.0, 1.0, 4.0});
    const MatrixXcd G = MatrixXcd::Identity(3, 3);
    auto rep = minmax_compare({Q, G, Q, G, G, {10, 0.5, 10}});
    EXPECT_EQ(rep.verdict[0], Verdict::holds);
    EXPECT_EQ(rep.verdict[1], Verdict::not_applicable);
    EXPECT_FALSE(rep.cap_ok[1]);
    EXPECT_TRUE(std::isinf(rep.delta[1]));

    rep = minmax_compare({Q, G, Q, G, 0.0 * G, {10, 10, 10}});
    for (auto v : rep.verdict) EXPECT_EQ(v, Verdict::not_applicable);
    EXPECT_EQ(to_string(Verdict::not_applicable), "not-applicable");
}

TEST(MinmaxCompare, RejectsBadInstances) {
    const MatrixXcd Q = diag({0.0, 1.0});
    const MatrixXcd G = MatrixXcd::Identity(2, 2);
    EXPECT_THROW(minmax_compare({Q, -G, Q, G, G, {1}}), DomainError);
    EXPECT_THROW(minmax_compare({Q, G, Q, G, G, {}}), DomainError);
    EXPECT_THROW(minmax_compare({Q, G, Q, G, G, {1, 1, 1}}), DomainError);
    MatrixXcd skew = Q;
    skew(0, 1) = 1.0;
    EXPECT_THROW(minmax_compare({skew, G, Q, G, G, {1}}), DomainError);
}

TEST(MinmaxSelftest, AllHold) {
    const auto s = minmax_selftest(20240517, 200);
    EXPECT_TRUE(s.passed());
    EXPECT_EQ(s.instances, 200);
    EXPECT_EQ(s.cases.size(), 200u);
    EXPECT_GT(s.pairs_checked, 200);
    EXPECT_EQ(s.violated, 0);
    EXPECT_EQ(s.not_applicable, 0);
    EXPECT_LT(s.max_oracle_discrepancy, 1e-9);
    EXPECT_GT(s.max_delta_norm, 0.0);
    EXPECT_GT(s.max_delta_form, 0.0);
}

TEST(MinmaxSelftest, Deterministic) {
    const auto a = minmax_selftest(7, 30);
    const auto b = minmax_selftest(7, 30);
    ASSERT_EQ(a.pairs_checked, b.pairs_checked);
    for (std::size_t i = 0; i < a.cases.size(); ++i) {
        EXPECT_EQ(a.cases[i].report.lambda, b.cases[i].report.lambda);
        EXPECT_EQ(a.cases[i].report.lambda_prime, b.cases[i].report.lambda_prime);
    }
    const auto c = minmax_selftest(8, 30);
    EXPECT_NE(a.cases[0].report.lambda, c.cases[0].report.lambda);
}

TEST(MinmaxSelftest, ManySeeds) {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) EXPECT_TRUE(minmax_selftest(seed, 60).passed()) << seed;
}
