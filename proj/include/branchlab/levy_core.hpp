#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "branchlab/measure_kit.hpp"

namespace branchlab::levy {

using measure::AtomicMeasure;
using measure::CompactifiedMeasure;

// Diffusion coefficient, mass at infinity and jump measure of a Bernstein function.
// The jump measure stored here is x times the jump intensity of the mechanism.
struct LevyTriple {
    double alpha0 = 0.0;
    double alpha_inf = 0.0;
    AtomicMeasure jumps;

    LevyTriple() = default;
    LevyTriple(double alpha0, double alpha_inf, AtomicMeasure jumps = {});
};

struct QuadratureRecipe {
    std::function<double(double)> density;
    double lo = 1e-8;
    double hi = 1e8;
    std::size_t count = 2000;

    // Midpoint rule in log x: one atom per cell at the geometric centre.
    AtomicMeasure build() const;
};

// Triple with mechanism q^index, 1 < index < 2: quadrature atoms on [lo, hi]
// plus the mass cut off below lo folded into alpha0 and above hi into alpha_inf.
LevyTriple stable_triple(double index, std::size_t count = 2000, double lo = 1e-8, double hi = 1e8);
// Density of the jump measure for the triple above.
double stable_density(double index, double x);

// feller (1,0,0), delta1 (0,0,unit atom at 1), killing (0,1,0), stable (index 3/2), zero.
LevyTriple named_triple(const std::string& name);
std::vector<std::string> triple_names();

double bernstein_value(const LevyTriple& t, double arg);
CompactifiedMeasure kappa_of(const LevyTriple& t);
LevyTriple triple_of(const CompactifiedMeasure& k);
double mechanism(const LevyTriple& t, double arg);
double mechanism_derivative(const LevyTriple& t, double arg, int order);
LevyTriple scale_triple(const LevyTriple& t, double dilation, double speed);
std::pair<double, double> left_right(const LevyTriple& t, double x);

struct GreyResult {
    bool converges = false;
    double value = 0.0;  // +inf when divergent
    double tail_exponent = 0.0;
};
GreyResult grey_check(const LevyTriple& t);
// Integral of 1/mechanism over [lo, inf); +inf when divergent.
double inverse_mechanism_integral(const LevyTriple& t, double lo);

double psi_prime_infinity(const LevyTriple& t);

struct ContinuityRow {
    double bernstein_gap = 0.0;
    double kappa_gap = 0.0;
    double mechanism_gap = 0.0;
    double left_right_gap = 0.0;
};

struct ContinuityReport {
    LevyTriple limit;
    bool limit_supplied = false;
    std::vector<ContinuityRow> rows;
    bool bernstein_decreasing = false;
    bool kappa_decreasing = false;
    bool mechanism_decreasing = false;
    bool left_right_decreasing = false;
    bool all_decreasing() const {
        return bernstein_decreasing && kappa_decreasing && mechanism_decreasing && left_right_decreasing;
    }
};

// Guess for the limit of a sequence: extrapolates matched atoms of the last two
// kappa measures in the coordinate x/(1+x), snapping to 0 or infinity.
LevyTriple estimate_limit(const std::vector<LevyTriple>& ts);
ContinuityReport continuity_report(const std::vector<LevyTriple>& ts, const std::vector<double>& q_grid,
                                   const std::optional<LevyTriple>& limit = std::nullopt);
// Nonincreasing within a relative tolerance, and strictly lower at the end unless all zero.
bool is_decreasing(const std::vector<double>& values, double tolerance = 1e-12);

namespace detail {
// exp(-z) - 1 + z without cancellation.
double compensated_exponential(double z);
}

}  // namespace branchlab::levy
