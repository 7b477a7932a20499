#include <algorithm>
#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "bandgap/analytic.hpp"

using namespace bandgap;

namespace {

constexpr double L = 0.5;
constexpr double r13 = 1.0 / 13;

std::vector<std::pair<double, long>> pairs(const LimitSpectrum& s) {
    std::vector<std::pair<double, long>> out;
    for (const auto& l : s.levels) out.emplace_back(l.value, l.multiplicity);
    return out;
}

} // namespace

TEST(LimitSpectra, Interval) {
    const auto d = interval_spectrum(0.5, IntervalCondition::dirichlet, 2).expanded();
    ASSERT_EQ(d.size(), 2u);
    EXPECT_NEAR(d[0], 4 * pi * pi, 1e-12);
    EXPECT_NEAR(d[1], 16 * pi * pi, 1e-12);
    EXPECT_NEAR(interval_spectrum(1.0, IntervalCondition::dirichlet, 1).expanded()[0], pi * pi, 1e-12);
    const auto n = interval_spectrum(0.5, IntervalCondition::neumann, 2).expanded();
    EXPECT_EQ(n[0], 0.0);
    EXPECT_NEAR(n[1], 4 * pi * pi, 1e-12);
}

TEST(LimitSpectra, Sphere) {
    using P = std::vector<std::pair<double, long>>;
    EXPECT_EQ(pairs(sphere_spectrum(2, 4)), (P{{0, 1}, {2, 3}, {6, 5}, {12, 7}}));
    EXPECT_EQ(pairs(sphere_spectrum(3, 2)), (P{{0, 1}, {3, 4}}));
    EXPECT_EQ(pairs(sphere_spectrum(2, 1)), (P{{0, 1}}));
}

TEST(LimitSpectra, ProductNeumann) {
    const auto s = product_neumann_spectrum(1.0, 0.5, 3, 7);
    const std::vector<double> values{0, 2, 6, 12, 20, 30, 4 * pi * pi};
    ASSERT_EQ(s.levels.size(), 7u);
    for (std::size_t i = 0; i < 7; ++i) EXPECT_NEAR(s.levels[i].value, values[i], 1e-12);
    EXPECT_EQ(s.levels[4].multiplicity, 9);
    const auto thin = product_neumann_spectrum(0.1, 0.5, 3, 2).expanded();
    EXPECT_EQ(thin[0], 0.0);
    EXPECT_NEAR(thin[1], 4 * pi * pi, 1e-12);
    EXPECT_NEAR(product_neumann_spectrum(1.0, 1.0, 4, 2).levels[1].value, 3.0, 1e-12);
    EXPECT_THROW(product_neumann_spectrum(1.0, 1.0, 2, 2), DomainError);
}

TEST(LimitSpectra, Chains) {
    EXPECT_EQ(chain_limit_spectrum(CellKind::dumbbell, 2, 0.0, 4).expanded(), (std::vector<double>{0, 2, 2, 2}));
    const auto linked = chain_limit_spectrum(CellKind::cylinder_linked, 2, 1.0, 6).expanded();
    EXPECT_EQ(linked, (std::vector<double>{0, 2, 2, 2, 6, 6}));
    const auto ten = chain_limit_spectrum(CellKind::cylinder_linked, 2, 1.0, 10).expanded();
    EXPECT_EQ(ten[8], 6.0);
    EXPECT_NEAR(ten[9], pi * pi, 1e-12);
    const auto long_link = chain_limit_spectrum(CellKind::cylinder_linked, 2, 10.0, 3).expanded();
    EXPECT_NEAR(long_link[1], std::pow(pi / 10, 2), 1e-12);
    EXPECT_LT(long_link[1], 2.0);
    for (const auto& lvl : chain_limit_spectrum(CellKind::cylinder_linked, 3, 2.0, 20).levels)
        EXPECT_GE(lvl.multiplicity, 1);
}

TEST(DispersionN0, TrivialRoots) {
    EXPECT_EQ(dispersion_n0(L, 0.0, 0), 0.0);
    EXPECT_NEAR(dispersion_n0(L, pi, 1), 2 * pi, 1e-12);
}

TEST(DispersionN0, GoldenValues) {
    EXPECT_NEAR(dispersion_n0(L, pi / 2, 0), 2.153747972623607, 1e-10);
    EXPECT_NEAR(dispersion_n0(L, pi, 0), 3.441334356077519, 1e-10);
    EXPECT_NEAR(dispersion_n0(L, pi / 2, 1), 7.287194334850801, 1e-10);
    EXPECT_NEAR(dispersion_n0(L, 0.0, 1), 8.115031352441737, 1e-10);
    EXPECT_NEAR(dispersion_n0(L, pi, 2), 13.70247383792691, 1e-10);
}

TEST(DispersionN0, ResidualAndConfinement) {
    for (int m = 0; m <= 4; ++m)
        for (int j = 0; j <= 32; ++j) {
            const double theta = 2 * pi * j / 32;
            const auto root = solve_dispersion_n0(L, theta, m);
            const double w = root.omega;
            EXPECT_GE(w, m * pi / L);
            EXPECT_LE(w, (m + 1) * pi / L);
            const double scale = 4.0 + (1 - L) * w;
            EXPECT_LE(std::abs(dispersion_n0_residual(L, theta, w)) / scale, 1e-9) << m << " " << theta;
            EXPECT_EQ(root.sign_changes <= 1, true) << m << " " << theta;
        }
}

TEST(DispersionN, GoldenValues) {
    const auto top = dispersion_n(L, r13, 1, pi, 1);
    EXPECT_NEAR(top.eta, 13.87766831636467, 1e-9);
    EXPECT_NEAR(top.omega, 4.856920618975747, 1e-9);
    EXPECT_NEAR(dispersion_n(L, r13, 1, 0.0, 1).eta, 13.87549736935226, 1e-9);
    EXPECT_NEAR(dispersion_n(L, r13, 1, pi / 2, 1).eta, 13.87658199609172, 1e-9);
}

TEST(DispersionN, Properties) {
    for (int n : {1, 2})
        for (int p : {1, 2, 3})
            for (double theta : {0.0, 0.5, pi / 2, 2.5, pi}) {
                const auto root = dispersion_n(L, r13, n, theta, p);
                const double kappa = n / r13;
                EXPECT_GT(root.eta, kappa);
                EXPECT_NEAR(root.eta * root.eta - root.omega * root.omega, kappa * kappa, 1e-9 * kappa * kappa);
                const double scale = std::pow(root.omega + kappa, 2);
                EXPECT_LE(std::abs(dispersion_n_residual(L, r13, n, theta, root.omega)) / scale, 1e-9);
            }
    EXPECT_EQ(dispersion_n(L, r13, 1, 0.3, 1).eta, dispersion_n(L, r13, 1, 2 * pi - 0.3, 1).eta);
    EXPECT_THROW(dispersion_n(L, r13, 0, 0.3, 1), DomainError);
}

TEST(DispersionN, AsymptoticBranch) {
    const double r = 0.005;
    for (double theta : {0.0, 1.0, pi}) {
        const auto root = dispersion_n(L, r, 1, theta, 1);
        EXPECT_TRUE(std::isfinite(root.eta));
        EXPECT_GT(root.eta, 1.0 / r);
    }
}

TEST(Limit2D, BandInfima) {
    const auto lb = limit2d_bands(L, r13, 170.0, 65);
    ASSERT_GE(lb.curves.size(), 3u);
    for (int m = 0; m <= 2; ++m) {
        EXPECT_EQ(lb.curves[m].m, m);
        EXPECT_NEAR(lb.bands[m].lo, std::pow(m * pi / L, 2), 1e-9);
        EXPECT_LT(lb.bands[m].hi, std::pow((m + 1) * pi / L, 2));
        if (m) EXPECT_LT(lb.bands[m - 1].hi, lb.bands[m].lo);
    }
    for (const auto& c : lb.curves)
        if (c.n > 0) EXPECT_GE(c.band().lo, std::pow(c.n / r13, 2));
    EXPECT_GE(lb.gaps.size(), 2u);
}

TEST(Limit2D, BranchContinuity) {
    const auto lb = limit2d_bands(L, r13, 170.0, 65);
    for (const auto& c : lb.curves) {
        EXPECT_EQ(c.anomalies, 0) << c.label();
        for (std::size_t j = 0; j + 1 < c.values.size(); ++j)
            EXPECT_LT(std::abs(c.values[j + 1] - c.values[j]), 0.5 * pi / L) << c.label();
    }
}

TEST(Limit2D, ThickLinkHasFewerGaps) {
    // Gaps between consecutive n=0 bands that no eta band enters.
    auto intact = [](const Limit2DBands& lb) {
        std::size_t count = 0;
        for (std::size_t m = 0; m + 1 < lb.curves.size() && lb.curves[m + 1].n == 0; ++m) {
            const Interval gap{lb.bands[m].hi, lb.bands[m + 1].lo};
            bool free = gap.hi > gap.lo;
            for (std::size_t i = 0; i < lb.curves.size(); ++i)
                if (lb.curves[i].n > 0 && lb.bands[i].lo < gap.hi && lb.bands[i].hi > gap.lo) free = false;
            count += free;
        }
        return count;
    };
    const auto thin = limit2d_bands(L, r13, 170.0, 65);
    const auto thick = limit2d_bands(L, 0.5, 170.0, 65);
    EXPECT_EQ(intact(thin), 2u);
    EXPECT_EQ(intact(thick), 0u);
    const auto floor = std::find_if(thick.curves.begin(), thick.curves.end(), [](const auto& c) { return c.n == 1; });
    ASSERT_NE(floor, thick.curves.end());
    EXPECT_GE(floor->band().lo, 4.0);
    EXPECT_LT(floor->band().lo, thick.bands[0].hi);
    EXPECT_EQ(thick.gaps.size(), 7u);
}

TEST(Figure3, Inventory) {
    const auto curves = figure3_curves(L, r13, 33);
    ASSERT_EQ(curves.size(), 6u);
    const std::vector<std::string> labels{"omega_0", "omega_1", "omega_2", "omega_3", "omega_4", "eta_1_1"};
    for (std::size_t i = 0; i < 6; ++i) {
        EXPECT_EQ(curves[i].label(), labels[i]);
        EXPECT_EQ(curves[i].thetas.front(), 0.0);
        EXPECT_EQ(curves[i].thetas.back(), 2 * pi);
        EXPECT_EQ(curves[i].values.front(), curves[i].values.back());
    }
}

TEST(Certificate, Cases) {
    EXPECT_TRUE(gap_certificate(L, r13, 2).certified);
    EXPECT_FALSE(gap_certificate(L, r13, 3).certified);
    EXPECT_FALSE(gap_certificate(L, 0.2, 2).certified);
    EXPECT_NEAR(gap_certificate(L, r13, 2).condition, L / (2 * pi), 1e-15);
    EXPECT_THROW(gap_certificate(L, r13, 0), DomainError);
}

TEST(Certificate, AgreesWithBands) {
    for (int m = 1; m <= 2; ++m) {
        const double r = 0.99 * L / (m * pi);
        ASSERT_TRUE(gap_certificate(L, r, m).certified);
        const double cap = std::pow(1.0 / r, 2) * 1.01;
        EXPECT_GE(limit2d_bands(L, r, cap, 33).gaps.size(), static_cast<std::size_t>(m)) << m;
    }
}
