#include "branchlab/scaling_limits.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <boost/math/tools/roots.hpp>

namespace branchlab::scaling {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kLargeArg = 1e6;
constexpr double kModerateArg = 1e4;

void require_critical(const FamilyLaw& law, const char* who) {
    if (!law.critical) throw std::invalid_argument(std::string(who) + ": family law must be critical");
}

void require_in_domain(const Rescaling& r, double arg, const char* who) {
    if (!(arg >= 0.0) || arg * r.size_unit > 1.0) {
        throw std::invalid_argument(std::string(who) + ": argument must lie in [0, 1/size_unit]");
    }
}

std::size_t step_count(double time, double step) {
    return static_cast<std::size_t>(std::floor(time / step * (1.0 + 1e-12)));
}

}  // namespace

Rescaling::Rescaling(double unit, double step) : size_unit(unit), time_step(step) {
    if (!(unit > 0.0 && unit <= 1.0) || !(step > 0.0 && step <= 1.0)) {
        throw std::invalid_argument("Rescaling: size unit and time step must lie in (0, 1]");
    }
}

Rescaling Rescaling::dyadic(int level) {
    const double v = std::ldexp(1.0, -level);
    return Rescaling(v, v);
}

AtomicMeasure rescaled_levy_measure(const FamilyLaw& law, const Rescaling& r) {
    require_critical(law, "rescaled_levy_measure");
    const auto& m = law.dist.masses();
    std::vector<measure::Atom> atoms;
    for (std::size_t j = 2; j < m.size(); ++j) {
        if (m[j] > 0.0) {
            atoms.push_back({static_cast<double>(j) * r.size_unit,
                             static_cast<double>(j - 1) * m[j] / r.time_step});
        }
    }
    return AtomicMeasure(std::move(atoms));
}

double rescaled_mechanism(const FamilyLaw& law, const Rescaling& r, double arg) {
    require_critical(law, "rescaled_mechanism");
    require_in_domain(r, arg, "rescaled_mechanism");
    return gw::discrete_mechanism(law, r.size_unit * arg) / (r.time_step * r.size_unit);
}

double euler_exponent(const FamilyLaw& law, const Rescaling& r, double arg, double time) {
    require_critical(law, "euler_exponent");
    require_in_domain(r, arg, "euler_exponent");
    if (!(time >= 0.0)) throw std::invalid_argument("euler_exponent: time must be nonnegative");
    double value = -std::expm1(-arg * r.size_unit) / r.size_unit;
    const std::size_t steps = step_count(time, r.time_step);
    for (std::size_t i = 0; i < steps; ++i) value -= r.time_step * rescaled_mechanism(law, r, value);
    return value;
}

double rescaled_gw_laplace(const FamilyLaw& law, const Rescaling& r, double initial_mass, double arg,
                           double time) {
    require_in_domain(r, arg, "rescaled_gw_laplace");
    if (!(initial_mass >= 0.0)) throw std::invalid_argument("rescaled_gw_laplace: negative initial mass");
    const double units = std::floor(initial_mass / r.size_unit * (1.0 + 1e-12));
    if (units == 0.0) return 1.0;
    const double value = euler_exponent(law, r, arg, time);
    return std::pow(1.0 - r.size_unit * value, units);
}

double rho_of(const LevyTriple& t, double time) {
    if (!(time > 0.0)) return kInf;
    const auto grey = levy::grey_check(t);
    if (!grey.converges) return kInf;
    auto excess = [&t, time](double log_rho) {
        return levy::inverse_mechanism_integral(t, std::exp(log_rho)) - time;
    };
    double lo = 0.0;
    double hi = 0.0;
    double flo = excess(lo);
    double fhi = flo;
    if (flo > 0.0) {
        do {
            hi += 2.0;
            fhi = excess(hi);
        } while (fhi > 0.0 && hi < 700.0);
        lo = hi - 2.0;
        flo = excess(lo);
    } else {
        do {
            lo -= 2.0;
            flo = excess(lo);
        } while (flo < 0.0 && lo > -700.0);
        hi = lo + 2.0;
        fhi = excess(hi);
    }
    if (flo < 0.0 || fhi > 0.0) throw std::runtime_error("rho_of: failed to bracket the root");
    boost::uintmax_t iters = 200;
    const auto root = boost::math::tools::toms748_solve(excess, lo, hi, flo, fhi,
                                                        boost::math::tools::eps_tolerance<double>(48), iters);
    return std::exp(0.5 * (root.first + root.second));
}

ExponentTable solve_exponent(const LevyTriple& t, const std::vector<double>& q_grid,
                             const std::vector<double>& t_grid) {
    if (q_grid.empty() || t_grid.empty()) throw std::invalid_argument("solve_exponent: empty grid");
    for (std::size_t i = 0; i < q_grid.size(); ++i) {
        if (!(q_grid[i] > 0.0) || (i > 0 && !(q_grid[i] > q_grid[i - 1]))) {
            throw std::invalid_argument("solve_exponent: q grid must be positive and increasing");
        }
    }
    for (std::size_t i = 0; i < t_grid.size(); ++i) {
        if (!(t_grid[i] >= 0.0) || (i > 0 && !(t_grid[i] > t_grid[i - 1]))) {
            throw std::invalid_argument("solve_exponent: t grid must be nonnegative and increasing");
        }
    }
    ExponentTable table;
    table.q_grid = q_grid;
    table.t_grid = t_grid;
    auto rate = [&t](double v) { return levy::mechanism(t, v); };
    for (double arg : q_grid) table.values.push_back(integrate_exponent(rate, arg, t_grid));
    const double slope = levy::psi_prime_infinity(t);
    for (double time : t_grid) {
        table.beta0.push_back(time == 0.0 ? 1.0 : (std::isinf(slope) ? 0.0 : std::exp(-slope * time)));
        table.rho.push_back(rho_of(t, time));
    }
    return table;
}

BetaRho beta_and_rho(const LevyTriple& t, const ExponentTable& table, double time) {
    if (table.t_grid.empty() || !(time >= 0.0) || time > table.t_grid.back()) {
        throw std::invalid_argument("beta_and_rho: time not covered by the table");
    }
    BetaRho out;
    if (time == 0.0) {
        out.rho = kInf;
        return out;
    }
    const double slope = levy::psi_prime_infinity(t);
    out.beta0 = std::isinf(slope) ? 0.0 : std::exp(-slope * time);
    out.rho_large_q = exponent_value(t, kLargeArg, time);
    out.beta0_large_q = out.rho_large_q / kLargeArg;
    const double moderate = exponent_value(t, kModerateArg, time);
    out.saturation_flag = out.rho_large_q - moderate > 1e-3 * out.rho_large_q;
    out.rho = rho_of(t, time);
    out.rho_finite = std::isfinite(out.rho);
    return out;
}

DampedSmolReport damped_smol_residual(const LevyTriple& t, double time, double arg, unsigned terms) {
    if (terms < 2) throw std::invalid_argument("damped_smol_residual: need at least two terms");
    if (!(time > 0.0) || !(arg > 0.0)) throw std::invalid_argument("damped_smol_residual: need time, arg > 0");
    DampedSmolReport rep;
    rep.rho = rho_of(t, time);
    if (!std::isfinite(rep.rho)) throw std::domain_error("damped_smol_residual: Grey's condition fails");
    rep.exponent = exponent_value(t, arg, time);
    rep.damping = t.alpha_inf;
    rep.closed_form = -levy::mechanism(t, rep.exponent) + rep.exponent * rep.damping;

    const double rho = rep.rho;
    const double ratio = rep.exponent / rho;
    const double log_rho = std::log(rho);
    for (unsigned k = 2; k <= terms; ++k) {
        const double kd = static_cast<double>(k);
        const double log_fact = std::lgamma(kd + 1.0);
        double rate = k == 2 ? 0.5 * t.alpha0 * rho * rho : 0.0;
        for (const auto& a : t.jumps.atoms()) {
            rate += a.weight * std::exp(kd * log_rho + (kd - 1.0) * std::log(a.location) - rho * a.location - log_fact);
        }
        const double moment = 1.0 - std::pow(1.0 - ratio, kd) - kd * ratio;
        rep.series += rate * moment;
    }
    rep.gap = std::abs(rep.series - rep.closed_form);

    const double delta = 1e-4 * time;
    const double forward = exponent_value(t, arg, time + delta);
    const double backward = exponent_value(t, arg, time - delta);
    const double derivative = (forward - backward) / (2.0 * delta);
    rep.time_derivative_gap = std::abs(derivative + levy::mechanism(t, rep.exponent));
    return rep;
}

ConvergenceReport levy_convergence_report(const std::vector<RescaledLaw>& entries,
                                          const std::vector<double>& q_grid,
                                          const std::optional<LevyTriple>& limit) {
    if (entries.size() < 3) throw std::invalid_argument("levy_convergence_report: need at least 3 entries");
    if (q_grid.empty()) throw std::invalid_argument("levy_convergence_report: empty grid");
    std::vector<LevyTriple> triples;
    for (const auto& e : entries) {
        require_critical(e.law, "levy_convergence_report");
        triples.emplace_back(0.0, 0.0, rescaled_levy_measure(e.law, e.rescaling));
    }
    ConvergenceReport rep;
    rep.limit = limit ? *limit : levy::estimate_limit(triples);
    const auto klim = levy::kappa_of(rep.limit);
    std::vector<double> kd, mg;
    for (std::size_t i = 0; i < entries.size(); ++i) {
        ConvergenceRow row;
        row.kappa = levy::kappa_of(triples[i]);
        row.kappa_distance = measure::kappa_distance(row.kappa, klim, q_grid);
        for (double arg : q_grid) {
            if (arg * entries[i].rescaling.size_unit <= 1.0) {
                row.mechanism_gap = std::max(
                    row.mechanism_gap,
                    std::abs(rescaled_mechanism(entries[i].law, entries[i].rescaling, arg) - levy::mechanism(rep.limit, arg)));
            }
            row.bernstein_gap = std::max(
                row.bernstein_gap,
                std::abs(levy::bernstein_value(triples[i], arg) - levy::bernstein_value(rep.limit, arg)) / (1.0 + arg));
        }
        kd.push_back(row.kappa_distance);
        mg.push_back(row.mechanism_gap);
        rep.rows.push_back(std::move(row));
    }
    rep.kappa_decreasing = levy::is_decreasing(kd);
    rep.mechanism_decreasing = levy::is_decreasing(mg);
    return rep;
}

std::vector<double> default_tail_points() { return {0.05, 0.1, 0.25, 0.5, 1.0, 2.0, 4.0, 8.0}; }

GrimvallStats grimvall_stats(const FamilyLaw& law, const Rescaling& r, const std::vector<double>& tail_points) {
    const auto& m = law.dist.masses();
    const double scale = r.size_unit * r.time_step;
    GrimvallStats s;
    for (std::size_t j = 0; j < m.size(); ++j) {
        if (m[j] == 0.0) continue;
        const double x = (static_cast<double>(j) - 1.0) * r.size_unit;
        const double denom = 1.0 + x * x;
        s.a_hat += m[j] * x / denom;
        s.b_hat += m[j] * x * x / denom;
    }
    s.a_hat /= scale;
    s.b_hat /= scale;
    for (double z : tail_points) {
        double mass = 0.0;
        for (std::size_t j = 0; j < m.size(); ++j) {
            if ((static_cast<double>(j) - 1.0) * r.size_unit >= z) mass += m[j];
        }
        s.tail.push_back({z, mass / scale});
    }
    return s;
}

GrimvallStats grimvall_limit_targets(const LevyTriple& t, const std::vector<double>& tail_points) {
    GrimvallStats s;
    s.a_hat = -t.alpha_inf;
    s.b_hat = t.alpha0;
    for (const auto& a : t.jumps.atoms()) {
        const double denom = 1.0 + a.location * a.location;
        s.a_hat -= a.weight * a.location * a.location / denom;
        s.b_hat += a.weight * a.location / denom;
    }
    for (double z : tail_points) {
        double mass = 0.0;
        for (const auto& a : t.jumps.atoms()) {
            if (a.location >= z) mass += a.weight / a.location;
        }
        s.tail.push_back({z, mass});
    }
    return s;
}

}  // namespace branchlab::scaling
