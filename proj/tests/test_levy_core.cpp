#include <gtest/gtest.h>

#include <cmath>
#include <stdexcept>

#include "branchlab/levy_core.hpp"
#include "oracles.hpp"

using namespace branchlab::levy;
using branchlab::measure::AtomicMeasure;
using branchlab::measure::default_q_grid;

namespace {

LevyTriple atom_triple(double x, double w) { return LevyTriple(0.0, 0.0, AtomicMeasure({{x, w}})); }

const LevyTriple& stable() {
    static const LevyTriple t = stable_triple(1.5);
    return t;
}

}  // namespace

TEST(LevyTriple, Validation) {
    EXPECT_THROW(LevyTriple(-1.0, 0.0), std::invalid_argument);
    EXPECT_THROW(LevyTriple(0.0, NAN), std::invalid_argument);
}

TEST(BernsteinValue, Examples) {
    EXPECT_EQ(bernstein_value(LevyTriple(), 3.0), 0.0);
    EXPECT_EQ(bernstein_value(LevyTriple(1.0, 0.0), 3.0), 3.0);
    EXPECT_EQ(bernstein_value(LevyTriple(0.0, 1.0), 3.0), 1.0);
    EXPECT_NEAR(bernstein_value(atom_triple(1.0, 1.0), 1.0), 1.0 - std::exp(-1.0), 1e-15);
    EXPECT_NEAR(bernstein_value(atom_triple(1.0, 1.0), 1.0), 0.6321206, 1e-7);
    EXPECT_THROW(bernstein_value(LevyTriple(), 0.0), std::invalid_argument);
}

TEST(Kappa, Examples) {
    const auto k1 = kappa_of(LevyTriple(1.0, 0.0));
    EXPECT_EQ(k1.mass_at_zero, 1.0);
    EXPECT_TRUE(k1.interior.empty());
    const auto k2 = kappa_of(atom_triple(2.0, 3.0));
    ASSERT_EQ(k2.interior.size(), 1u);
    EXPECT_EQ(k2.interior.atoms()[0].location, 2.0);
    EXPECT_EQ(k2.interior.atoms()[0].weight, 3.0);
    const auto k3 = kappa_of(atom_triple(0.5, 2.0));
    EXPECT_EQ(k3.interior.atoms()[0].weight, 1.0);
}

TEST(KappaProperty, RoundTripExact) {
    oracle::Gen g(21);
    for (int trial = 0; trial < 200; ++trial) {
        const auto t = g.triple();
        const auto back = triple_of(kappa_of(t));
        EXPECT_EQ(back.alpha0, t.alpha0);
        EXPECT_EQ(back.alpha_inf, t.alpha_inf);
        ASSERT_EQ(back.jumps.size(), t.jumps.size());
        for (std::size_t i = 0; i < t.jumps.size(); ++i) {
            EXPECT_EQ(back.jumps.atoms()[i].location, t.jumps.atoms()[i].location);
            // x -> x min 1 -> divide back: exact when x >= 1, one rounding each way otherwise
            EXPECT_NEAR(back.jumps.atoms()[i].weight, t.jumps.atoms()[i].weight, 4e-16 * t.jumps.atoms()[i].weight);
        }
        const auto k = kappa_of(t);
        const auto kk = kappa_of(triple_of(k));
        EXPECT_EQ(kk.mass_at_zero, k.mass_at_zero);
        EXPECT_EQ(kk.mass_at_infinity, k.mass_at_infinity);
    }
}

TEST(Mechanism, Examples) {
    EXPECT_EQ(mechanism(LevyTriple(1.0, 0.0), 2.0), 2.0);
    EXPECT_EQ(mechanism(LevyTriple(0.0, 1.0), 0.7), 0.7);
    EXPECT_EQ(mechanism(stable(), 0.0), 0.0);
}

TEST(Mechanism, StableMatchesHighResolutionQuadrature) {
    for (double arg : {0.5, 1.0, 2.0}) {
        const double ref = oracle::stable_mechanism_reference(arg);
        EXPECT_NEAR(ref, std::pow(arg, 1.5), 1e-6 * std::pow(arg, 1.5));
        EXPECT_NEAR(mechanism(stable(), arg), ref, 1e-4 * ref);
    }
}

TEST(MechanismDerivative, Examples) {
    EXPECT_EQ(mechanism_derivative(LevyTriple(1.0, 0.0), 0.4, 2), 1.0);
    EXPECT_EQ(mechanism_derivative(LevyTriple(1.0, 0.0), 3.0, 1), 3.0);
    EXPECT_NEAR(mechanism_derivative(atom_triple(1.0, 1.0), 1e-8, 2), 1.0, 1e-7);
    EXPECT_THROW(mechanism_derivative(LevyTriple(1.0, 0.0), 1.0, 0), std::invalid_argument);
}

TEST(MechanismDerivative, MatchesFiniteDifferences) {
    oracle::Gen g(22);
    for (int trial = 0; trial < 50; ++trial) {
        const auto t = g.triple();
        const double arg = g.log_uniform(0.1, 5.0);
        const double size_unit = 1e-4 * arg;
        const double fd1 = (mechanism(t, arg + size_unit) - mechanism(t, arg - size_unit)) / (2.0 * size_unit);
        EXPECT_NEAR(mechanism_derivative(t, arg, 1), fd1, 1e-6 * (1.0 + std::abs(fd1)));
        const double fd3 = (mechanism_derivative(t, arg + size_unit, 2) - mechanism_derivative(t, arg - size_unit, 2)) / (2.0 * size_unit);
        EXPECT_NEAR(mechanism_derivative(t, arg, 3), fd3, 1e-6 * (1.0 + std::abs(fd3)));
    }
}

TEST(ScaleTriple, Examples) {
    const auto a = scale_triple(LevyTriple(1.0, 0.0), 4.0, 2.0);
    EXPECT_EQ(a.alpha0, 0.5);
    EXPECT_EQ(a.alpha_inf, 0.0);
    const auto b = scale_triple(LevyTriple(0.0, 1.0), 4.0, 2.0);
    EXPECT_EQ(b.alpha0, 0.0);
    EXPECT_EQ(b.alpha_inf, 2.0);
    const auto c = scale_triple(atom_triple(2.0, 1.0), 2.0, 3.0);
    ASSERT_EQ(c.jumps.size(), 1u);
    EXPECT_EQ(c.jumps.atoms()[0].location, 1.0);
    EXPECT_EQ(c.jumps.atoms()[0].weight, 3.0);
    EXPECT_THROW(scale_triple(LevyTriple(), 0.0, 1.0), std::invalid_argument);
    EXPECT_THROW(scale_triple(LevyTriple(), 1.0, -1.0), std::invalid_argument);
}

TEST(ScaleTripleProperty, BernsteinAndMechanismIdentities) {
    oracle::Gen g(23);
    for (int trial = 0; trial < 100; ++trial) {
        const auto t = g.triple();
        const double dilation = g.log_uniform(0.2, 5.0);
        const double speed = g.log_uniform(0.2, 5.0);
        const double arg = g.log_uniform(0.01, 10.0);
        const auto s = scale_triple(t, dilation, speed);
        const double f = speed * bernstein_value(t, arg / dilation);
        const double m = speed * dilation * mechanism(t, arg / dilation);
        EXPECT_NEAR(bernstein_value(s, arg), f, 1e-12 * std::max(1.0, f));
        EXPECT_NEAR(mechanism(s, arg), m, 1e-10 * std::max(1.0, m));
    }
}

TEST(LeftRight, Examples) {
    EXPECT_EQ(left_right(LevyTriple(1.0, 0.0), 0.3), std::make_pair(1.0, 0.0));
    EXPECT_EQ(left_right(LevyTriple(0.0, 2.0), 7.0), std::make_pair(0.0, 2.0));
    EXPECT_EQ(left_right(atom_triple(1.0, 3.0), 0.5), std::make_pair(0.0, 3.0));
    EXPECT_EQ(left_right(atom_triple(1.0, 3.0), 2.0), std::make_pair(3.0, 0.0));
}

TEST(GreyCheck, Examples) {
    const auto feller = grey_check(LevyTriple(1.0, 0.0));
    EXPECT_TRUE(feller.converges);
    EXPECT_NEAR(feller.value, 2.0, 1e-6);
    const auto killing = grey_check(LevyTriple(0.0, 1.0));
    EXPECT_FALSE(killing.converges);
    EXPECT_TRUE(std::isinf(killing.value));
    const auto st = grey_check(stable());
    EXPECT_TRUE(st.converges);
    EXPECT_NEAR(st.value, 2.0, 1e-3);
    EXPECT_FALSE(grey_check(atom_triple(1.0, 1.0)).converges);
    EXPECT_THROW(grey_check(LevyTriple()), std::domain_error);
}

TEST(PsiPrimeInfinity, Examples) {
    EXPECT_TRUE(std::isinf(psi_prime_infinity(LevyTriple(1.0, 0.0))));
    EXPECT_EQ(psi_prime_infinity(atom_triple(1.0, 2.5)), 2.5);
    EXPECT_EQ(psi_prime_infinity(LevyTriple(0.0, 0.5)), 0.5);
}

TEST(BernsteinProperty, MonotoneConcaveAndLimits) {
    oracle::Gen g(24);
    const auto grid = default_q_grid();
    for (int trial = 0; trial < 100; ++trial) {
        const auto t = g.triple();
        for (std::size_t i = 1; i + 1 < grid.size(); ++i) {
            const double a = bernstein_value(t, grid[i - 1]);
            const double b = bernstein_value(t, grid[i]);
            const double c = bernstein_value(t, grid[i + 1]);
            EXPECT_LE(a, b + 1e-15);
            // geometric grid: chord slopes must decrease
            const double left = (b - a) / (grid[i] - grid[i - 1]);
            const double right = (c - b) / (grid[i + 1] - grid[i]);
            EXPECT_LE(right, left + 1e-12 * (1.0 + std::abs(left)));
        }
        EXPECT_NEAR(bernstein_value(t, 1e-12), t.alpha_inf, 1e-10);
        EXPECT_NEAR(bernstein_value(t, 1e12) / 1e12, t.alpha0, 1e-10);
    }
}

TEST(MechanismProperty, ConvexSignPatternZeroAtOrigin) {
    oracle::Gen g(25);
    const auto grid = default_q_grid();
    for (int trial = 0; trial < 100; ++trial) {
        const auto t = g.triple();
        EXPECT_EQ(mechanism(t, 0.0), 0.0);
        for (std::size_t i = 1; i + 1 < grid.size(); ++i) {
            const double a = mechanism(t, grid[i - 1]), b = mechanism(t, grid[i]), c = mechanism(t, grid[i + 1]);
            const double left = (b - a) / (grid[i] - grid[i - 1]);
            const double right = (c - b) / (grid[i + 1] - grid[i]);
            EXPECT_GE(right - left, -1e-12 * (1.0 + std::abs(right)));
        }
        for (double arg : grid) {
            for (int k = 2; k <= 6; ++k) EXPECT_GE(std::pow(-1.0, k) * mechanism_derivative(t, arg, k), 0.0);
        }
    }
}

TEST(CompensatedExponential, MatchesSeriesNearZeroAndDirectFarAway) {
    EXPECT_EQ(detail::compensated_exponential(0.0), 0.0);
    EXPECT_NEAR(detail::compensated_exponential(1e-6), 0.5e-12 - 1e-18 / 6.0 + 1e-24 / 24.0, 1e-27);
    EXPECT_NEAR(detail::compensated_exponential(3.0), std::exp(-3.0) - 1.0 + 3.0, 1e-15);
}

TEST(ContinuityReport, ConstantSequence) {
    const LevyTriple t(1.0, 0.5, AtomicMeasure({{2.0, 1.0}}));
    const auto rep = continuity_report({t, t, t, t}, default_q_grid());
    EXPECT_EQ(rep.limit.alpha0, 1.0);
    EXPECT_EQ(rep.limit.alpha_inf, 0.5);
    for (const auto& row : rep.rows) {
        EXPECT_EQ(row.bernstein_gap, 0.0);
        EXPECT_EQ(row.kappa_gap, 0.0);
        EXPECT_EQ(row.mechanism_gap, 0.0);
        EXPECT_EQ(row.left_right_gap, 0.0);
    }
}

TEST(ContinuityReport, AtomsShrinkingToZero) {
    std::vector<LevyTriple> ts;
    for (int k = 1; k <= 6; ++k) ts.push_back(atom_triple(1.0 / k, k));
    const auto rep = continuity_report(ts, default_q_grid());
    EXPECT_NEAR(rep.limit.alpha0, 1.0, 1e-9);
    EXPECT_EQ(rep.limit.alpha_inf, 0.0);
    EXPECT_TRUE(rep.limit.jumps.empty());
    EXPECT_TRUE(rep.all_decreasing());
}

TEST(ContinuityReport, AtomsEscapingToInfinity) {
    std::vector<LevyTriple> ts;
    for (int k = 1; k <= 6; ++k) ts.push_back(atom_triple(k, 1.0));
    const auto rep = continuity_report(ts, default_q_grid());
    EXPECT_EQ(rep.limit.alpha0, 0.0);
    EXPECT_NEAR(rep.limit.alpha_inf, 1.0, 1e-9);
    EXPECT_TRUE(rep.limit.jumps.empty());
    EXPECT_TRUE(rep.all_decreasing());
}

TEST(ContinuityReport, Preconditions) {
    const LevyTriple t(1.0, 0.0);
    EXPECT_THROW(continuity_report({t, t}, default_q_grid()), std::invalid_argument);
    EXPECT_THROW(continuity_report({t, t, t}, {}), std::invalid_argument);
}

TEST(StableTriple, QuadratureShape) {
    const auto& t = stable();
    EXPECT_EQ(t.jumps.size(), 2000u);
    EXPECT_GT(t.alpha0, 0.0);
    EXPECT_GT(t.alpha_inf, 0.0);
    EXPECT_TRUE(std::isinf(psi_prime_infinity(t)));
}
