#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "branchlab/gw_discrete.hpp"
#include "branchlab/levy_core.hpp"

namespace branchlab::scaling {

using gw::FamilyLaw;
using levy::LevyTriple;
using measure::AtomicMeasure;

struct Rescaling {
    double size_unit = 1.0;
    double time_step = 1.0;

    Rescaling() = default;
    Rescaling(double size_unit, double time_step);
    // size_unit = time_step = 2^-level
    static Rescaling dyadic(int level);
};

AtomicMeasure rescaled_levy_measure(const FamilyLaw& law, const Rescaling& r);
double rescaled_mechanism(const FamilyLaw& law, const Rescaling& r, double arg);
double euler_exponent(const FamilyLaw& law, const Rescaling& r, double arg, double time);
double rescaled_gw_laplace(const FamilyLaw& law, const Rescaling& r, double initial_mass, double arg,
                           double time);

// Solution at `times` (sorted, nonnegative) of y' = -rate(y), y(0) = start, by
// adaptive fourth-order Runge-Kutta with step doubling and local extrapolation.
std::vector<double> integrate_exponent(const std::function<double(double)>& rate, double start,
                                       const std::vector<double>& times, double rel_tol = 1e-12);
double exponent_value(const LevyTriple& t, double arg, double time);

struct ExponentTable {
    std::vector<double> q_grid;
    std::vector<double> t_grid;
    std::vector<std::vector<double>> values;  // values[i][j] at (q_grid[i], t_grid[j])
    std::vector<double> rho;                  // +inf where the total jump mass is infinite
    std::vector<double> beta0;

    double at(std::size_t qi, std::size_t ti) const { return values[qi][ti]; }
};

ExponentTable solve_exponent(const LevyTriple& t, const std::vector<double>& q_grid,
                             const std::vector<double>& t_grid);

struct BetaRho {
    double beta0 = 1.0;
    double beta0_large_q = 1.0;  // exponent(1e6, time) / 1e6
    double rho = 0.0;            // +inf when Grey's condition fails
    bool rho_finite = false;
    double rho_large_q = 0.0;    // exponent(1e6, time)
    bool saturation_flag = false;  // exponent(1e6) and exponent(1e4) differ by more than 1e-3 relative
};

// Total mass of the jump measure at `time`: the root of integral_rho^inf du / mechanism = time.
double rho_of(const LevyTriple& t, double time);
BetaRho beta_and_rho(const LevyTriple& t, const ExponentTable& table, double time);

struct DampedSmolReport {
    double gap = 0.0;
    double series = 0.0;
    double closed_form = 0.0;
    double rho = 0.0;
    double exponent = 0.0;
    double damping = 0.0;
    double time_derivative_gap = 0.0;
};
DampedSmolReport damped_smol_residual(const LevyTriple& t, double time, double arg, unsigned terms);

struct ConvergenceRow {
    levy::CompactifiedMeasure kappa;
    double kappa_distance = 0.0;
    double mechanism_gap = 0.0;
    double bernstein_gap = 0.0;
};
struct ConvergenceReport {
    LevyTriple limit;
    std::vector<ConvergenceRow> rows;
    bool kappa_decreasing = false;
    bool mechanism_decreasing = false;
};
struct RescaledLaw {
    FamilyLaw law;
    Rescaling rescaling;
};
ConvergenceReport levy_convergence_report(const std::vector<RescaledLaw>& entries,
                                          const std::vector<double>& q_grid,
                                          const std::optional<LevyTriple>& limit = std::nullopt);

struct TailSample {
    double x = 0.0;
    double value = 0.0;
};
struct GrimvallStats {
    double a_hat = 0.0;
    double b_hat = 0.0;
    std::vector<TailSample> tail;
};
std::vector<double> default_tail_points();
GrimvallStats grimvall_stats(const FamilyLaw& law, const Rescaling& r,
                             const std::vector<double>& tail_points = default_tail_points());
GrimvallStats grimvall_limit_targets(const LevyTriple& t,
                                     const std::vector<double>& tail_points = default_tail_points());

}  // namespace branchlab::scaling
