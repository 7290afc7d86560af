#include <gtest/gtest.h>

#include <cmath>
#include <stdexcept>

#include "branchlab/measure_kit.hpp"
#include "oracles.hpp"

using namespace branchlab::measure;

namespace {

DiscreteDistribution from(std::vector<double> v) { return DiscreteDistribution(std::move(v)); }

}  // namespace

TEST(DiscreteDistribution, RejectsBadMass) {
    EXPECT_THROW(DiscreteDistribution({0.5, 0.4}), std::invalid_argument);
    EXPECT_THROW(DiscreteDistribution({1.5, -0.5}), std::invalid_argument);
    EXPECT_THROW(DiscreteDistribution({NAN, 1.0}), std::invalid_argument);
    EXPECT_NO_THROW(DiscreteDistribution({0.5, 0.25}, 0.25));
}

TEST(ConvolvePower, PointMassShift) {
    const auto r = convolve_power(DiscreteDistribution::point_mass(1), 3, 8);
    EXPECT_DOUBLE_EQ(r[3], 1.0);
    EXPECT_DOUBLE_EQ(r.total(), 1.0);
}

TEST(ConvolvePower, ZeroPowerIsPointMassAtZero) {
    const auto r = convolve_power(from({0.2, 0.3, 0.5}), 0, 5);
    EXPECT_DOUBLE_EQ(r[0], 1.0);
    EXPECT_EQ(r.last_nonzero(), 0u);
}

TEST(ConvolvePower, TwoFoldOfHalfHalf) {
    const auto r = convolve_power(from({0.5, 0.0, 0.5}), 2, 4);
    EXPECT_DOUBLE_EQ(r[0], 0.25);
    EXPECT_DOUBLE_EQ(r[2], 0.5);
    EXPECT_DOUBLE_EQ(r[4], 0.25);
    EXPECT_DOUBLE_EQ(r.tail_mass(), 0.0);
}

TEST(ConvolvePower, TruncationGoesToTail) {
    const auto r = convolve_power(from({0.5, 0.0, 0.5}), 2, 3);
    EXPECT_DOUBLE_EQ(r.tail_mass(), 0.25);
    EXPECT_NEAR(r.total(), 1.0, 1e-15);
}

TEST(ConvolvePowerProperty, MassConservedAndMeanMultiplies) {
    oracle::Gen g(11);
    for (int trial = 0; trial < 200; ++trial) {
        const auto p = from(g.probability_vector(6));
        const unsigned k = static_cast<unsigned>(g.index(6));
        const std::size_t cap = 1 + g.index(40);
        const auto r = convolve_power(p, k, cap);
        EXPECT_NEAR(r.total(), 1.0, 1e-12);
        if (r.tail_mass() == 0.0 && p.last_nonzero() * k <= cap) {
            EXPECT_NEAR(r.mean(), k * p.mean(), 1e-12);
        }
    }
}

TEST(TotalVariation, Examples) {
    const auto p = from({0.1, 0.6, 0.3});
    EXPECT_EQ(total_variation(p, p), 0.0);
    EXPECT_DOUBLE_EQ(total_variation(DiscreteDistribution::point_mass(0), DiscreteDistribution::point_mass(1)), 1.0);
    EXPECT_DOUBLE_EQ(total_variation(from({0.5, 0.5}), DiscreteDistribution::point_mass(0)), 0.5);
}

TEST(TotalVariationProperty, SymmetricAndTriangle) {
    oracle::Gen g(12);
    for (int trial = 0; trial < 300; ++trial) {
        const auto a = from(g.probability_vector(8));
        const auto b = from(g.probability_vector(8));
        const auto c = from(g.probability_vector(8));
        const double ab = total_variation(a, b);
        EXPECT_EQ(ab, total_variation(b, a));
        EXPECT_LE(ab, total_variation(a, c) + total_variation(c, b) + 1e-15);
        EXPECT_GE(ab, 0.0);
        EXPECT_LE(ab, 1.0 + 1e-15);
        EXPECT_EQ(total_variation(a, a), 0.0);
    }
}

TEST(EmpiricalDistribution, Frequencies) {
    const auto e = empirical_distribution({0, 2, 2, 2});
    EXPECT_DOUBLE_EQ(e[0], 0.25);
    EXPECT_DOUBLE_EQ(e[2], 0.75);
    EXPECT_THROW(empirical_distribution({}), std::invalid_argument);
}

TEST(AtomicMeasure, MergesAndSorts) {
    AtomicMeasure m({{2.0, 1.0}, {1.0, 0.5}, {2.0, 1.0}, {3.0, 0.0}});
    ASSERT_EQ(m.size(), 2u);
    EXPECT_EQ(m.atoms()[0].location, 1.0);
    EXPECT_EQ(m.atoms()[1].weight, 2.0);
    EXPECT_DOUBLE_EQ(m.mass_between(1.0, 2.0), 2.0);
    EXPECT_DOUBLE_EQ(m.mass_above(1.0), 2.0);
    EXPECT_THROW(AtomicMeasure({{-1.0, 1.0}}), std::invalid_argument);
}

TEST(Integrate, Examples) {
    EXPECT_EQ(integrate(AtomicMeasure(), [](double) { return 7.0; }), 0.0);
    EXPECT_EQ(integrate(AtomicMeasure({{1.0, 2.0}}), [](double x) { return x; }), 2.0);
    EXPECT_EQ(integrate(AtomicMeasure({{1.0, 1.0}, {2.0, 1.0}}), [](double x) { return x * x; }), 5.0);
}

TEST(Integrate, NonFiniteIntegrandThrows) {
    EXPECT_THROW(integrate(AtomicMeasure({{1.0, 1.0}}), [](double) { return INFINITY; }), std::domain_error);
}

TEST(KappaDistance, Examples) {
    const auto grid = default_q_grid();
    CompactifiedMeasure one{1.0, 0.0, {}};
    CompactifiedMeasure two{2.0, 0.0, {}};
    EXPECT_EQ(kappa_distance(one, one, grid), 0.0);
    EXPECT_GE(kappa_distance(one, two, grid), 1.0);
    EXPECT_THROW(kappa_distance(one, two, {}), std::invalid_argument);
}

TEST(KappaDistance, ShrinkingAtomApproachesZero) {
    const auto grid = default_q_grid();
    CompactifiedMeasure origin{1.0, 0.0, {}};
    double prev = INFINITY;
    for (double size_unit : {1e-1, 1e-2, 1e-3}) {
        CompactifiedMeasure m{0.0, 0.0, AtomicMeasure({{2.0 * size_unit, 1.0}})};
        const double d = kappa_distance(m, origin, grid);
        // g_q(2h) = (1 - exp(-2hq)) / 2h against arg, largest at the top of the grid
        double expected = 0.0;
        for (double arg : grid) expected = std::max(expected, std::abs(-std::expm1(-2.0 * size_unit * arg) / (2.0 * size_unit) - arg));
        EXPECT_NEAR(d, expected, 1e-12 * (1.0 + expected));
        EXPECT_LT(d, prev);
        prev = d;
    }
}

TEST(KappaDistanceProperty, SymmetricAndZeroOnDiagonal) {
    oracle::Gen g(13);
    const auto grid = default_q_grid();
    for (int trial = 0; trial < 100; ++trial) {
        CompactifiedMeasure a{g.uniform(), g.uniform(), g.atoms(5)};
        CompactifiedMeasure b{g.uniform(), g.uniform(), g.atoms(5)};
        EXPECT_EQ(kappa_distance(a, b, grid), kappa_distance(b, a, grid));
        EXPECT_EQ(kappa_distance(a, a, grid), 0.0);
    }
}

TEST(Grids, LogGridEnds) {
    const auto grid = default_q_grid();
    ASSERT_EQ(grid.size(), 41u);
    EXPECT_DOUBLE_EQ(grid.front(), std::ldexp(1.0, -10));
    EXPECT_DOUBLE_EQ(grid.back(), std::ldexp(1.0, 10));
    for (std::size_t i = 1; i < grid.size(); ++i) EXPECT_GT(grid[i], grid[i - 1]);
}
