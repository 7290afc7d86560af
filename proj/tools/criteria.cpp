#include "criteria.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>

#include "branchlab/counter_rng.hpp"
#include "branchlab/gw_discrete.hpp"
#include "branchlab/levy_core.hpp"
#include "branchlab/scaling_limits.hpp"
#include "branchlab/universal.hpp"

namespace branchlab::cli {

namespace {

using nlohmann::json;
using levy::LevyTriple;

const std::vector<double> kUnitTimes{0.5, 1.0, 2.0};
const std::vector<double> kUnitArgs{0.5, 1.0, 2.0};

double feller_exponent(double arg, double time) { return arg / (1.0 + arg * time / 2.0); }
double stable_exponent(double arg, double time) { return std::pow(1.0 / std::sqrt(arg) + time / 2.0, -2.0); }

json vec(const std::vector<double>& v) {
    json j = json::array();
    for (double x : v) j.push_back(number_json(x));
    return j;
}

void recursion_conservation(RunResult& r, const CriterionOptions&) {
    const auto law = gw::named_law("binary");
    const auto seq = gw::descendant_sequence(law, 12, 4096);
    double mass_err = 0.0;
    double mean_err = 0.0;
    CsvTable t("recursion_conservation", {"n", "total", "mean", "tail"});
    for (std::size_t n = 0; n < seq.size(); ++n) {
        const auto& nu = seq[n];
        mass_err = std::max(mass_err, std::abs(nu.total() - 1.0));
        // truncated mass only lowers the mean; the bound uses the tail mass at the cap
        const double excess = std::abs(nu.mean() - 1.0) - nu.tail_mass() * static_cast<double>(nu.cap() + 1);
        mean_err = std::max(mean_err, std::max(0.0, excess));
        t.add_row({double(n), nu.total(), nu.mean(), nu.tail_mass()});
    }
    r.results["max_mass_error"] = mass_err;
    r.results["max_mean_error_beyond_tail"] = mean_err;
    r.checks.push_back(check_at_most("mass_conservation", mass_err, 1e-10));
    r.checks.push_back(check_at_most("mean_conservation", mean_err, 1e-8));
    r.tables.push_back(std::move(t));
}

void duality(RunResult& r, const CriterionOptions& opt) {
    const auto law = gw::named_law("binary");
    const unsigned n = 6;
    const std::size_t units = 1000000;
    const auto exact = gw::descendant_distribution(law, n, 4096);
    const auto coag = gw::simulate_coagulation(law, n, units, opt.seed);
    const auto gwp = gw::simulate_gw(law, n, units, opt.seed, 1, opt.threads);
    const auto coag_emp = measure::empirical_distribution(coag.clusters);
    const auto gw_emp = measure::empirical_distribution(gwp.generation(n));
    const double tv_cr = measure::total_variation(coag_emp, exact);
    const double tv_gr = measure::total_variation(gw_emp, exact);
    const double tv_cg = measure::total_variation(coag_emp, gw_emp);
    r.results["coagulation_clusters"] = coag.clusters.size();
    r.results["tv_coagulation_recursion"] = tv_cr;
    r.results["tv_gw_recursion"] = tv_gr;
    r.results["tv_coagulation_gw"] = tv_cg;
    r.checks.push_back(check_at_most("tv_coagulation_recursion", tv_cr, 0.01));
    r.checks.push_back(check_at_most("tv_gw_recursion", tv_gr, 0.01));
    r.checks.push_back(check_at_most("tv_coagulation_gw", tv_cg, 0.01));
}

std::size_t safe_cap(const gw::FamilyLaw& law, unsigned n) {
    std::size_t cap = 1;
    for (unsigned i = 0; i < n; ++i) cap *= std::max<std::size_t>(1, law.max_size());
    return cap;
}

void smol_discrete(RunResult& r, const CriterionOptions&) {
    CsvTable t("smol_discrete", {"law", "n", "residual"});
    for (const char* name : {"binary", "subcritical-demo"}) {
        const auto law = gw::named_law(name);
        double worst = 0.0;
        for (unsigned n = 0; n <= 6; ++n) {
            const double res = gw::smoluchowski_residual(law, n, safe_cap(law, n + 1));
            worst = std::max(worst, res);
            t.add_row({name, std::to_string(n), format_number(res)});
        }
        r.results[std::string("max_residual_") + name] = worst;
        r.checks.push_back(check_at_most(std::string("residual_") + name, worst, 1e-10));
    }
    r.tables.push_back(std::move(t));
}

void bernstein_step(RunResult& r, const CriterionOptions&) {
    const auto grid = measure::default_q_grid();
    for (const char* name : {"unit", "binary", "ternary"}) {
        const auto law = gw::named_law(name);
        double worst = 0.0;
        for (unsigned n = 0; n <= 8; ++n) worst = std::max(worst, gw::bernstein_step_residual(law, n, grid));
        r.results[std::string("max_residual_") + name] = worst;
        r.checks.push_back(check_at_most(std::string("one_step_") + name, worst, 1e-12));
    }
}

void euler_order(RunResult& r, const CriterionOptions&) {
    const auto law = gw::named_law("binary");
    CsvTable t("euler_order", {"q", "t", "k", "error", "ratio"});
    double lo = INFINITY, hi = -INFINITY;
    for (double arg : kUnitArgs) {
        for (double time : kUnitTimes) {
            double prev = NAN;
            for (int k = 6; k <= 12; ++k) {
                const double err = std::abs(scaling::euler_exponent(law, scaling::Rescaling::dyadic(k), arg, time) -
                                            feller_exponent(arg, time));
                const double ratio = prev / err;
                if (k >= 8) {
                    lo = std::min(lo, ratio);
                    hi = std::max(hi, ratio);
                }
                t.add_row({arg, time, double(k), err, ratio});
                prev = err;
            }
        }
    }
    r.results["min_ratio"] = lo;
    r.results["max_ratio"] = hi;
    r.checks.push_back(Check{"min_ratio_at_least_1.7", lo, 1.7, lo >= 1.7});
    r.checks.push_back(check_at_most("max_ratio", hi, 2.3));
    r.tables.push_back(std::move(t));
}

void ode_closed_form(RunResult& r, const CriterionOptions&) {
    const auto grid = measure::default_q_grid();
    const auto feller = levy::named_triple("feller");
    const auto stable = levy::named_triple("stable");
    const auto tf = scaling::solve_exponent(feller, grid, kUnitTimes);
    const auto ts = scaling::solve_exponent(stable, grid, kUnitTimes);
    double ef = 0.0, es = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        for (std::size_t j = 0; j < kUnitTimes.size(); ++j) {
            ef = std::max(ef, std::abs(tf.at(i, j) - feller_exponent(grid[i], kUnitTimes[j])));
            es = std::max(es, std::abs(ts.at(i, j) - stable_exponent(grid[i], kUnitTimes[j])));
        }
    }
    double semigroup = 0.0;
    const std::vector<std::pair<double, double>> pairs{{0.25, 0.5}, {0.5, 1.0}, {1.0, 0.25}};
    for (const auto* triple : {&feller, &stable}) {
        for (std::size_t i = 0; i < grid.size(); i += 4) {
            for (const auto& [s, u] : pairs) {
                const double direct = scaling::exponent_value(*triple, grid[i], s + u);
                const double composed = scaling::exponent_value(*triple, scaling::exponent_value(*triple, grid[i], u), s);
                semigroup = std::max(semigroup, std::abs(direct - composed));
            }
        }
    }
    r.results["feller_sup_error"] = ef;
    r.results["stable_sup_error"] = es;
    r.results["semigroup_error"] = semigroup;
    r.results["stable_phi_1_2"] = scaling::exponent_value(stable, 1.0, 2.0);
    r.checks.push_back(check_at_most("feller_sup_error", ef, 1e-8));
    r.checks.push_back(check_at_most("stable_sup_error", es, 1e-4));
    r.checks.push_back(check_at_most("semigroup_error", semigroup, 1e-7));
}

void levy_convergence(RunResult& r, const CriterionOptions&) {
    const auto law = gw::named_law("binary");
    const auto grid = measure::log_grid(std::ldexp(1.0, -10), 2.0, 41);
    std::vector<scaling::RescaledLaw> entries;
    for (int k = 2; k <= 10; ++k) entries.push_back({law, scaling::Rescaling::dyadic(k)});
    const LevyTriple target(1.0, 0.0);
    const auto rep = scaling::levy_convergence_report(entries, grid, target);
    const auto guessed = scaling::levy_convergence_report(entries, grid);
    std::vector<double> dist;
    double mech = 0.0;
    CsvTable t("levy_convergence", {"k", "kappa_distance", "mechanism_gap", "bernstein_gap"});
    for (std::size_t i = 0; i < rep.rows.size(); ++i) {
        dist.push_back(rep.rows[i].kappa_distance);
        mech = std::max(mech, rep.rows[i].mechanism_gap);
        t.add_row({double(i + 2), rep.rows[i].kappa_distance, rep.rows[i].mechanism_gap, rep.rows[i].bernstein_gap});
    }
    bool strict = true;
    for (std::size_t i = 1; i < dist.size(); ++i) strict = strict && dist[i] < dist[i - 1];
    r.results["kappa_distances"] = vec(dist);
    r.results["estimated_limit"] = {{"alpha0", guessed.limit.alpha0},
                                    {"alpha_inf", guessed.limit.alpha_inf},
                                    {"atoms", guessed.limit.jumps.size()}};
    r.checks.push_back(check_true("kappa_distance_strictly_decreasing", strict));
    r.checks.push_back(check_at_most("kappa_distance_k10", dist.back(), 0.01));
    r.checks.push_back(Check{"mechanism_gap_identically_zero", mech, 0.0, mech == 0.0});
    r.tables.push_back(std::move(t));
}

void beta_rho(RunResult& r, const CriterionOptions&) {
    const auto feller = levy::named_triple("feller");
    const auto delta = levy::named_triple("delta1");
    const auto stable = levy::named_triple("stable");
    const auto tf = scaling::solve_exponent(feller, kUnitArgs, kUnitTimes);
    const auto br = scaling::beta_and_rho(feller, tf, 1.0);
    double beta_max = 0.0;
    for (double time : kUnitTimes) beta_max = std::max(beta_max, scaling::beta_and_rho(feller, tf, time).beta0);
    const auto td = scaling::solve_exponent(delta, kUnitArgs, kUnitTimes);
    const auto bd = scaling::beta_and_rho(delta, td, 1.0);
    const auto grey_delta = levy::grey_check(delta);
    const auto grey_feller = levy::grey_check(feller);
    const auto grey_stable = levy::grey_check(stable);
    r.results["feller_rho_1"] = number_json(br.rho);
    r.results["feller_rho_1_large_q"] = br.rho_large_q;
    r.results["delta1_beta0_1"] = bd.beta0;
    r.results["delta1_beta0_1_large_q"] = bd.beta0_large_q;
    r.results["grey_feller"] = number_json(grey_feller.value);
    r.results["grey_stable"] = number_json(grey_stable.value);
    r.checks.push_back(check_at_most("feller_rho_1", std::abs(br.rho - 2.0), 1e-3));
    r.checks.push_back(Check{"feller_beta0_zero", beta_max, 0.0, beta_max == 0.0});
    r.checks.push_back(check_at_most("delta1_beta0", std::abs(bd.beta0 - std::exp(-1.0)), 1e-4));
    r.checks.push_back(check_at_most("delta1_beta0_large_q", std::abs(bd.beta0_large_q - std::exp(-1.0)), 1e-4));
    r.checks.push_back(check_true("delta1_grey_false", !grey_delta.converges && !bd.rho_finite));
    r.checks.push_back(check_at_most("grey_feller", std::abs(grey_feller.value - 2.0), 1e-3));
    r.checks.push_back(check_at_most("grey_stable", std::abs(grey_stable.value - 2.0), 1e-3));
}

void smol_identity(RunResult& r, const CriterionOptions&) {
    const auto feller = levy::named_triple("feller");
    const auto stable = levy::named_triple("stable");
    CsvTable t("smol_identity", {"triple", "q", "t", "terms", "gap", "series", "closed_form", "rho"});
    double wf = 0.0, ws = 0.0;
    for (double arg : kUnitArgs) {
        for (double time : kUnitTimes) {
            const auto f = scaling::damped_smol_residual(feller, time, arg, 2);
            const auto s = scaling::damped_smol_residual(stable, time, arg, 30);
            wf = std::max(wf, f.gap);
            ws = std::max(ws, s.gap);
            t.add_row({"feller", format_number(arg), format_number(time), "2", format_number(f.gap),
                       format_number(f.series), format_number(f.closed_form), format_number(f.rho)});
            t.add_row({"stable", format_number(arg), format_number(time), "30", format_number(s.gap),
                       format_number(s.series), format_number(s.closed_form), format_number(s.rho)});
        }
    }
    r.results["feller_max_gap"] = wf;
    r.results["stable_max_gap"] = ws;
    r.checks.push_back(check_at_most("feller_K2_gap", wf, 1e-10));
    r.checks.push_back(check_at_most("stable_K30_gap", ws, 1e-6));
    r.tables.push_back(std::move(t));
}

void grimvall(RunResult& r, const CriterionOptions&) {
    const double size_unit = 1e-2;
    const auto stats = scaling::grimvall_stats(gw::named_law("binary"), scaling::Rescaling(size_unit, size_unit));
    const auto target = scaling::grimvall_limit_targets(LevyTriple(1.0, 0.0));
    double tail = 0.0, target_tail = 0.0;
    for (const auto& s : stats.tail) tail = std::max(tail, std::abs(s.value));
    for (const auto& s : target.tail) target_tail = std::max(target_tail, std::abs(s.value));
    r.results["a_hat"] = stats.a_hat;
    r.results["b_hat"] = stats.b_hat;
    r.results["target_a_hat"] = target.a_hat;
    r.results["target_b_hat"] = target.b_hat;
    r.checks.push_back(Check{"a_hat_exactly_zero", stats.a_hat, 0.0, stats.a_hat == 0.0});
    r.checks.push_back(check_at_most("b_hat_minus_one", std::abs(stats.b_hat - 1.0), size_unit * size_unit));
    r.checks.push_back(check_at_most("a_hat_vs_target", std::abs(stats.a_hat - target.a_hat), size_unit * size_unit));
    r.checks.push_back(check_at_most("b_hat_vs_target", std::abs(stats.b_hat - target.b_hat), size_unit * size_unit));
    r.checks.push_back(Check{"tail_zero", tail, 0.0, tail == 0.0 && target_tail == 0.0});
}

universal::PackedTriple standard_packing() {
    const auto grid = measure::default_q_grid();
    std::vector<LevyTriple> targets;
    for (const char* n : {"feller", "delta1", "killing", "stable"}) targets.push_back(levy::named_triple(n));
    return universal::pack(universal::dense_targets(targets, 4), universal::make_schedule(1.0, 4), grid);
}

void packing(RunResult& r, const CriterionOptions&) {
    const auto grid = measure::default_q_grid();
    const auto packed = standard_packing();
    const auto& s = packed.schedule;
    r.results["partial_sum"] = s.partial_sum;
    r.results["remainder_bound"] = s.remainder_bound;
    r.checks.push_back(check_at_most("schedule_sum_below_one", s.weighted_sum(), 1.0 - 1e-12));
    r.checks.push_back(check_at_most("schedule_sum_matches_0.40489", std::abs(s.weighted_sum() - 0.40489), 1e-5));
    r.checks.push_back(check_at_most("remainder_bound", s.remainder_bound, 1e-6));
    CsvTable t("packing", {"k", "c_k", "b_k", "head_bound", "tail_bound", "recovery_gap"});
    for (unsigned k = 1; k <= s.k_max; ++k) {
        const double gap = packed.recovery_gap(k, grid);
        t.add_row({double(k), s.speeds[k], s.dilations[k], s.head_bounds[k], s.tail_bounds[k], gap});
        r.checks.push_back(check_at_most("head_bound_k" + std::to_string(k), s.head_bounds[k], 1.0 / k));
        r.checks.push_back(check_at_most("recovery_gap_k" + std::to_string(k), gap, 1.0 / k + s.tail_bounds[k]));
    }
    const double top = packed.phi_star(packed.q_max);
    r.results["phi_star_q_max"] = top;
    r.results["mu_star_mass"] = packed.lambda_star.jumps.total_mass();
    r.checks.push_back(check_at_most("phi_star_q_max_below_one", top, 1.0 - 1e-12));
    r.tables.push_back(std::move(t));
}

void universal_law(RunResult& r, const CriterionOptions&) {
    const auto packed = standard_packing();
    const auto& mu = packed.lambda_star.jumps;
    const auto law = universal::universal_family_law(mu);
    r.results["p0"] = law.p0;
    r.results["p1"] = law.p1;
    r.results["sizes"] = law.upper.size();
    r.checks.push_back(check_at_most("total_probability", std::abs(law.total() - 1.0), 1e-12));
    r.checks.push_back(check_at_most("criticality", std::abs(law.mean() - 1.0), 1e-12));
    r.checks.push_back(check_true("p0_positive", law.p0 > 0.0));
    const double top = mu.atoms().back().location;
    const auto points = measure::log_grid(2.5, 2.0 * top, 20);
    double worst = 0.0;
    CsvTable t("universal_law_sandwich", {"z", "star_right_z", "coarse_right_z", "star_right_z_minus_2"});
    for (double z : points) {
        const double lower = mu.mass_above(z);
        const double mid = law.coarse_right(z);
        const double upper = mu.mass_above(z - 2.0);
        worst = std::max({worst, lower - mid, mid - upper});
        t.add_row({z, lower, mid, upper});
    }
    r.results["sandwich_worst_violation"] = worst;
    r.checks.push_back(check_at_most("tail_sandwich_20_points", worst, 1e-12));
    r.tables.push_back(std::move(t));
}

LevyTriple random_triple(rng::CounterRng& g) {
    const double a0 = g.uniform() < 0.5 ? g.uniform() : 0.0;
    const double ainf = g.uniform() < 0.5 ? g.uniform() : 0.0;
    std::vector<measure::Atom> atoms;
    const int count = static_cast<int>(g.uniform() * 4.0);
    for (int i = 0; i < count; ++i) atoms.push_back({std::exp(std::log(0.1) + g.uniform() * std::log(100.0)), 2.0 * g.uniform()});
    LevyTriple t(a0, ainf, measure::AtomicMeasure(std::move(atoms)));
    if (levy::mechanism(t, 1.0) == 0.0) t.alpha0 = 0.5;
    return t;
}

void universal_csbp(RunResult& r, const CriterionOptions& opt) {
    const auto grid = measure::default_q_grid();
    const std::vector<double> times{0.0, 0.5, 1.0, 2.0};
    CsvTable t("universal_csbp", {"target", "k", "sup_gap", "zero_time_gap"});
    for (const char* name : {"feller", "delta1"}) {
        const auto target = levy::named_triple(name);
        const auto packed = universal::pack(universal::dense_targets({target}, 3), universal::make_schedule(1.0, 3), grid);
        const auto rows = universal::universal_csbp_demo(packed, target, {1, 2, 3}, grid, times);
        bool strict = true;
        double zero = 0.0;
        json gaps = json::array();
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (i > 0) strict = strict && rows[i].sup_gap < rows[i - 1].sup_gap;
            zero = std::max(zero, rows[i].zero_time_gap);
            gaps.push_back(rows[i].sup_gap);
            t.add_row({name, std::to_string(rows[i].k), format_number(rows[i].sup_gap), format_number(rows[i].zero_time_gap)});
        }
        r.results[std::string("gaps_") + name] = gaps;
        r.checks.push_back(check_true(std::string("gaps_decreasing_") + name, strict));
        r.checks.push_back(Check{std::string("zero_time_gap_") + name, zero, 0.0, zero == 0.0});
    }
    rng::CounterRng g(opt.seed, 13);
    double dilation_err = 0.0;
    for (int i = 0; i < 20; ++i) {
        const auto triple = random_triple(g);
        const double dilation = std::exp(std::log(0.5) + g.uniform() * std::log(8.0));
        const double speed = std::exp(std::log(0.5) + g.uniform() * std::log(8.0));
        const double arg = grid[static_cast<std::size_t>(g.uniform() * double(grid.size()))];
        const double time = 0.25 + g.uniform();
        const double scaled = scaling::exponent_value(levy::scale_triple(triple, dilation, speed), arg, time);
        const double direct = dilation * scaling::exponent_value(triple, arg / dilation, speed * time);
        dilation_err = std::max(dilation_err, std::abs(scaled - direct));
    }
    r.results["dilation_max_error"] = dilation_err;
    r.checks.push_back(check_at_most("dilation_self_consistency", dilation_err, 1e-8));
    r.tables.push_back(std::move(t));
}

using Runner = void (*)(RunResult&, const CriterionOptions&);

struct Entry {
    CriterionInfo info;
    Runner run;
};

const std::vector<Entry>& registry() {
    static const std::vector<Entry> entries{
        {{1, "recursion-conservation", "Exact-recursion conservation", 10}, recursion_conservation},
        {{2, "duality", "Coagulation and GW duality", 60}, duality},
        {{3, "smol-discrete", "Discrete Smoluchowski identity", 5}, smol_discrete},
        {{4, "bernstein-step", "Bernstein one-step identity", 1}, bernstein_step},
        {{5, "euler-order", "Euler to ODE first-order convergence", 30}, euler_order},
        {{6, "ode-closed-form", "ODE solver vs closed forms", 30}, ode_closed_form},
        {{7, "levy-convergence", "Levy-convergence diagnostic", 5}, levy_convergence},
        {{8, "beta-rho", "beta0 and rho", 10}, beta_rho},
        {{9, "smol-identity", "Damped Smoluchowski identity", 10}, smol_identity},
        {{10, "grimvall", "Grimvall equivalence", 1}, grimvall},
        {{11, "packing", "Packing construction", 30}, packing},
        {{12, "universal-law", "Universal family law", 1}, universal_law},
        {{13, "universal-csbp", "Universal CSBP demo", 120}, universal_csbp},
    };
    return entries;
}

}  // namespace

const std::vector<CriterionInfo>& criteria() {
    static const std::vector<CriterionInfo> infos = [] {
        std::vector<CriterionInfo> v;
        for (const auto& e : registry()) v.push_back(e.info);
        return v;
    }();
    return infos;
}

const CriterionInfo& find_criterion(const std::string& key) {
    for (const auto& c : criteria()) {
        if (c.name == key || std::to_string(c.number) == key) return c;
    }
    throw std::invalid_argument("unknown criterion: " + key);
}

RunResult run_criterion(const CriterionInfo& info, const CriterionOptions& options) {
    RunResult r;
    r.experiment = "verify-" + info.name;
    r.config = {{"criterion", info.name}, {"number", info.number}, {"seed", options.seed}, {"threads", options.threads}};
    const auto start = std::chrono::steady_clock::now();
    for (const auto& e : registry()) {
        if (e.info.number == info.number) e.run(r, options);
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    r.results["runtime_seconds"] = seconds;
    r.checks.push_back(check_at_most("runtime_seconds", seconds, info.time_limit_seconds));
    return r;
}

}  // namespace branchlab::cli
