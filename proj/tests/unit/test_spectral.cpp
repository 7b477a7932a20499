#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "bandgap/geometry.hpp"
#include "bandgap/reduction.hpp"
#include "bandgap/spectral.hpp"

using namespace bandgap;

namespace {

SturmLiouvilleProblem uniform(double length, int n, BoundaryCondition bc, double p = 1.0, double q = 0.0,
                              double m = 1.0) {
    SturmLiouvilleProblem slp;
    for (int i = 0; i <= n; ++i) slp.grid.push_back(length * i / n);
    slp.stiffness.assign(n + 1, p);
    slp.potential.assign(n + 1, q);
    slp.mass.assign(n + 1, m);
    slp.bc = bc;
    return slp;
}

double lowest(const SturmLiouvilleProblem& slp, int k = 1) { return solve(assemble(slp), k).values.back(); }

} // namespace

TEST(Assemble, ConstantsInKernel) {
    const auto pencil = assemble(uniform(1.0, 32, BoundaryCondition::periodic(0.0)));
    EXPECT_TRUE(pencil.real_valued);
    const Eigen::VectorXcd ones = Eigen::VectorXcd::Ones(pencil.size());
    EXPECT_LT((pencil.stiffness * ones).norm(), 1e-12);
}

TEST(Assemble, Hermitian) {
    for (double theta : {0.0, 0.7, pi, 4.0}) {
        const auto pencil = assemble(uniform(1.0, 16, BoundaryCondition::periodic(theta), 1.0, 2.0));
        EXPECT_LT((pencil.stiffness - pencil.stiffness.adjoint()).norm(), 1e-14);
        EXPECT_LT((pencil.mass - pencil.mass.adjoint()).norm(), 1e-14);
        EXPECT_EQ(pencil.real_valued, theta == 0.0 || theta == pi);
        if (pencil.real_valued) EXPECT_EQ(pencil.stiffness.imag().norm(), 0.0);
    }
}

TEST(Assemble, ConjugateTheta) {
    const double theta = 1.1;
    const auto a = assemble(uniform(1.0, 16, BoundaryCondition::periodic(theta)));
    const auto b = assemble(uniform(1.0, 16, BoundaryCondition::periodic(2 * pi - theta)));
    EXPECT_LT((a.stiffness - b.stiffness.conjugate()).norm(), 1e-12);
    EXPECT_LT((a.mass - b.mass.conjugate()).norm(), 1e-12);
}

TEST(Assemble, DirichletDropsEnds) {
    EXPECT_EQ(assemble(uniform(1.0, 16, BoundaryCondition::dirichlet())).size(), 15);
    EXPECT_EQ(assemble(uniform(1.0, 16, BoundaryCondition::neumann())).size(), 17);
    EXPECT_EQ(assemble(uniform(1.0, 16, BoundaryCondition::periodic(1.0))).size(), 16);
    EXPECT_THROW(assemble(uniform(1.0, 2, BoundaryCondition::dirichlet())), DomainError);
}

TEST(Solve, AntiperiodicUpperBound) {
    const double h = 1.0 / 64;
    const double l1 = lowest(uniform(1.0, 64, BoundaryCondition::periodic(pi)));
    EXPECT_GE(l1, pi * pi);
    EXPECT_LE(l1, pi * pi * (1 + h * h));
}

TEST(Solve, DirichletHalfInterval) {
    double prev = INFINITY;
    for (int n : {16, 32, 64, 128}) {
        const double l1 = lowest(uniform(0.5, n, BoundaryCondition::dirichlet()));
        EXPECT_GE(l1, 4 * pi * pi);
        EXPECT_LT(l1, prev);
        prev = l1;
    }
    EXPECT_NEAR(prev, 4 * pi * pi, 2e-3);
}

TEST(Solve, NestedRefinementDecreases) {
    for (double theta : {0.0, 1.3, pi}) {
        std::vector<double> prev(4, INFINITY);
        for (int n : {8, 16, 32, 64}) {
            const auto vals = solve(assemble(uniform(1.0, n, BoundaryCondition::periodic(theta), 1.0, 3.0)), 4).values;
            for (std::size_t k = 0; k < 4; ++k) {
                EXPECT_LE(vals[k], prev[k] * (1 + 1e-12)) << "n=" << n << " k=" << k;
                prev[k] = vals[k];
            }
        }
    }
}

TEST(Solve, FlatCylinderLimits) {
    const Cell cell = flat_cylinder_cell(2, 0.2, 1.0);
    auto mode = [&](int l, double theta, int k) {
        return solve(assemble(reduce(cell, angular_mode(2, l), BoundaryCondition::periodic(theta))), k).values;
    };
    const auto anti = mode(0, pi, 1);
    EXPECT_NEAR(anti[0], pi * pi, 1e-3);
    const auto per = mode(0, 0.0, 3);
    EXPECT_LE(std::abs(per[0]), 1e-10);
    EXPECT_NEAR(per[1], 4 * pi * pi, 1e-2);
    EXPECT_NEAR(per[2], 4 * pi * pi, 1e-2);
    EXPECT_NEAR(mode(1, 0.0, 1)[0], 25.0, 1e-9);
}

TEST(Solve, ConjugationSymmetry) {
    const Cell cell = dumbbell_cell(2, 0.1, {0.02});
    for (double theta : {0.4, 1.9, 2.8}) {
        for (int l : {0, 1}) {
            const auto a = solve(assemble(reduce(cell, angular_mode(2, l), BoundaryCondition::periodic(theta))), 6);
            const auto b =
                solve(assemble(reduce(cell, angular_mode(2, l), BoundaryCondition::periodic(2 * pi - theta))), 6);
            for (std::size_t k = 0; k < 6; ++k) EXPECT_NEAR(a.values[k], b.values[k], 1e-9 * (1 + a.values[k]));
        }
    }
}

TEST(Solve, ResidualsAndOrthonormality) {
    for (const Cell& cell : {Cell{dumbbell_cell(2, 0.05)}, Cell{conformal_cell(3, 1.0, 0.25, 0.75, 0.2)}}) {
        const auto pencil = assemble(reduce(cell, angular_mode(dimension_of(cell), 1), BoundaryCondition::periodic(1.0)));
        const auto eig = solve(pencil, 8, {.vectors = true});
        ASSERT_EQ(eig.residuals.size(), 8u);
        for (std::size_t k = 0; k < 8; ++k) {
            EXPECT_GE(eig.values[k], 0.0);
            if (k) EXPECT_LE(eig.values[k - 1], eig.values[k]);
            EXPECT_LE(eig.residuals[k], 1e-8);
        }
        const Eigen::MatrixXcd gram = eig.vectors.adjoint() * pencil.mass * eig.vectors;
        EXPECT_LT((gram - Eigen::MatrixXcd::Identity(8, 8)).norm(), 1e-8);
    }
}

TEST(Solve, TooManyRequested) {
    const auto pencil = assemble(uniform(1.0, 8, BoundaryCondition::periodic(0.5)));
    EXPECT_THROW(solve(pencil, 9), DomainError);
    EXPECT_THROW(solve(pencil, 0), DomainError);
    EXPECT_EQ(solve_all(pencil).values.size(), 8u);
}

TEST(Convergence, SecondOrder) {
    std::vector<RefinementLevel> levels;
    for (int n : {16, 32, 64, 128}) levels.push_back({1.0 / n, lowest(uniform(1.0, n, BoundaryCondition::periodic(pi)))});
    const auto rep = convergence_order(levels, pi * pi);
    EXPECT_FALSE(rep.exact);
    EXPECT_GE(rep.order, 1.8);
    EXPECT_LE(rep.order, 2.2);
    EXPECT_NEAR(rep.richardson_order, 2.0, 0.2);
    for (double p : rep.pairwise_orders) EXPECT_NEAR(p, 2.0, 0.2);
}

TEST(Convergence, ExactSolution) {
    std::vector<RefinementLevel> levels;
    for (int n : {8, 16, 32})
        levels.push_back({1.0 / n, lowest(uniform(1.0, n, BoundaryCondition::periodic(0.0), 0.2, 1.0, 0.2))});
    const auto rep = convergence_order(levels, 5.0);
    EXPECT_TRUE(rep.exact);
}

TEST(Convergence, Preconditions) {
    const std::vector<RefinementLevel> two{{0.1, 1.1}, {0.05, 1.01}};
    EXPECT_THROW(convergence_order(two, 1.0), DomainError);
    const std::vector<RefinementLevel> noisy{{0.1, 1.1}, {0.05, 1.01}, {0.025, 1.05}};
    EXPECT_THROW(convergence_order(noisy, 1.0), NumericError);
}
