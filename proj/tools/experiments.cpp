#include "experiments.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "branchlab/gw_discrete.hpp"
#include "branchlab/levy_core.hpp"
#include "branchlab/scaling_limits.hpp"
#include "branchlab/universal.hpp"
#include "criteria.hpp"

namespace branchlab::cli {

namespace {

using nlohmann::json;
using levy::LevyTriple;

json echo(const ExperimentConfig& c) {
    json j = json::object();
    j["experiment"] = c.experiment;
    for (const auto& [k, v] : c.entries()) j[k] = v;
    return j;
}

unsigned get_unsigned(const ExperimentConfig& c, const std::string& key, long long fallback) {
    const long long v = c.get_int(key, fallback);
    if (v < 0) throw ConfigError(key + " must be nonnegative");
    return static_cast<unsigned>(v);
}

LevyTriple triple_setting(const ExperimentConfig& c, const std::string& key, const std::string& fallback) {
    try {
        return levy::named_triple(c.get_string(key, fallback));
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
}

scaling::Rescaling rescaling_of(const ExperimentConfig& c) {
    const double size_unit = c.get_double("h", std::ldexp(1.0, -10));
    const double time_step = c.get_double("tau", size_unit);
    try {
        return scaling::Rescaling(size_unit, time_step);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
}

double law_variance(const gw::FamilyLaw& law) {
    double v = 0.0;
    const auto& m = law.dist.masses();
    for (std::size_t j = 0; j < m.size(); ++j) v += m[j] * (double(j) - law.mean) * (double(j) - law.mean);
    return v;
}

RunResult evolve(const ExperimentConfig& c) {
    RunResult r;
    const auto law = c.law();
    const unsigned n = get_unsigned(c, "n", 12);
    const auto cap = static_cast<std::size_t>(c.get_int("cap", 4096));
    const auto seq = gw::descendant_sequence(law, n, cap);
    CsvTable t("evolve", {"n", "j", "mass"});
    double mass_err = 0.0;
    json tails = json::array();
    for (std::size_t g = 0; g < seq.size(); ++g) {
        const auto& m = seq[g].masses();
        for (std::size_t j = 0; j < m.size(); ++j) {
            if (m[j] > 0.0) t.add_row({double(g), double(j), m[j]});
        }
        mass_err = std::max(mass_err, std::abs(seq[g].total() - 1.0));
        tails.push_back(seq[g].tail_mass());
    }
    r.results["generations"] = n;
    r.results["final_mean"] = seq.back().mean();
    r.results["tail_mass"] = tails;
    r.checks.push_back(check_at_most("mass_conservation", mass_err, c.get_double("tolerance", 1e-10)));
    r.tables.push_back(std::move(t));
    return r;
}

RunResult simulate(const ExperimentConfig& c) {
    RunResult r;
    const auto law = c.law();
    const unsigned n = get_unsigned(c, "n", 6);
    const auto units = static_cast<std::size_t>(c.get_int("units", 100000));
    const auto seed = c.get_seed(20261016);
    const unsigned threads = get_unsigned(c, "threads", 1);
    const std::string mode = c.get_string("mode", "gw");
    std::vector<std::uint64_t> samples;
    if (mode == "gw") {
        samples = gw::simulate_gw(law, n, units, seed, 1, threads).generation(n);
    } else if (mode == "coagulation") {
        samples = gw::simulate_coagulation(law, n, units, seed).clusters;
    } else if (mode == "lamperti") {
        const auto s = gw::lamperti_gw(law, 1, n, units, seed, threads);
        samples = s.generation(n);
    } else {
        throw ConfigError("unknown simulation mode: " + mode);
    }
    const auto emp = measure::empirical_distribution(samples);
    const auto exact = gw::descendant_distribution(law, n, std::max<std::size_t>(4096, emp.cap()));
    const double tv = measure::total_variation(emp, exact);
    CsvTable t("simulate", {"j", "empirical", "recursion"});
    const std::size_t top = std::max(emp.cap(), exact.last_nonzero());
    for (std::size_t j = 0; j <= top; ++j) {
        if (emp[j] > 0.0 || exact[j] > 0.0) t.add_row({double(j), emp[j], exact[j]});
    }
    r.results["mode"] = mode;
    r.results["samples"] = samples.size();
    r.results["total_variation"] = tv;
    r.results["empirical_mean"] = emp.mean();
    r.checks.push_back(check_at_most("total_variation", tv, c.get_double("tolerance", 0.01)));
    r.tables.push_back(std::move(t));
    return r;
}

RunResult limit(const ExperimentConfig& c) {
    RunResult r;
    const auto law = c.law();
    if (!law.critical) throw ConfigError("limit requires a critical law");
    const auto res = rescaling_of(c);
    const auto qs = c.get_grid("q_grid", {0.5, 1.0, 2.0});
    const auto ts = c.get_grid("t_grid", {0.5, 1.0, 2.0});
    const double variance = law_variance(law);
    CsvTable t("limit", {"q", "t", "euler", "closed_form", "gap"});
    double worst = 0.0;
    double euler = 0.0, closed = 0.0;
    for (double arg : qs) {
        for (double time : ts) {
            euler = scaling::euler_exponent(law, res, arg, time);
            closed = arg / (1.0 + variance * arg * time / 2.0);
            worst = std::max(worst, std::abs(euler - closed));
            t.add_row({arg, time, euler, closed, std::abs(euler - closed)});
        }
    }
    if (qs.size() * ts.size() == 1) {
        r.results["euler"] = euler;
        r.results["closed_form"] = closed;
    }
    r.results["variance"] = variance;
    r.results["gap"] = worst;
    r.checks.push_back(check_at_most("gap", worst, c.get_double("tolerance", 2e-3)));
    r.tables.push_back(std::move(t));
    return r;
}

RunResult grimvall(const ExperimentConfig& c) {
    RunResult r;
    const auto law = c.law();
    const auto res = rescaling_of(c);
    const auto stats = scaling::grimvall_stats(law, res);
    const auto target = scaling::grimvall_limit_targets(LevyTriple(law_variance(law), 0.0));
    CsvTable t("grimvall_tail", {"x", "tail", "target_tail"});
    double tail_gap = 0.0;
    for (std::size_t i = 0; i < stats.tail.size(); ++i) {
        t.add_row({stats.tail[i].x, stats.tail[i].value, target.tail[i].value});
        tail_gap = std::max(tail_gap, std::abs(stats.tail[i].value - target.tail[i].value));
    }
    const double tol = c.get_double("tolerance", res.size_unit * res.size_unit);
    r.results["a_hat"] = stats.a_hat;
    r.results["b_hat"] = stats.b_hat;
    r.results["target_a_hat"] = target.a_hat;
    r.results["target_b_hat"] = target.b_hat;
    r.checks.push_back(check_at_most("a_hat_gap", std::abs(stats.a_hat - target.a_hat), tol));
    r.checks.push_back(check_at_most("b_hat_gap", std::abs(stats.b_hat - target.b_hat), tol));
    r.checks.push_back(check_at_most("tail_gap", tail_gap, tol));
    r.tables.push_back(std::move(t));
    return r;
}

RunResult smol_residual(const ExperimentConfig& c) {
    RunResult r;
    if (c.has("triple")) {
        const auto triple = triple_setting(c, "triple", "feller");
        const unsigned terms = get_unsigned(c, "terms", 30);
        const auto qs = c.get_grid("q_grid", {0.5, 1.0, 2.0});
        const auto ts = c.get_grid("t_grid", {0.5, 1.0, 2.0});
        CsvTable t("smol_residual", {"q", "t", "gap", "series", "closed_form", "rho", "time_derivative_gap"});
        double worst = 0.0;
        for (double arg : qs) {
            for (double time : ts) {
                const auto rep = scaling::damped_smol_residual(triple, time, arg, terms);
                worst = std::max(worst, rep.gap);
                t.add_row({arg, time, rep.gap, rep.series, rep.closed_form, rep.rho, rep.time_derivative_gap});
            }
        }
        r.results["max_gap"] = worst;
        r.checks.push_back(check_at_most("damped_residual", worst, c.get_double("tolerance", 1e-6)));
        r.tables.push_back(std::move(t));
        return r;
    }
    const auto law = c.law();
    const unsigned n_max = get_unsigned(c, "n", 6);
    CsvTable t("smol_residual", {"n", "residual"});
    double worst = 0.0;
    for (unsigned n = 0; n <= n_max; ++n) {
        std::size_t cap = 1;
        for (unsigned i = 0; i <= n; ++i) cap = std::min<std::size_t>(cap * std::max<std::size_t>(1, law.max_size()), 1u << 22);
        const double res = gw::smoluchowski_residual(law, n, cap);
        worst = std::max(worst, res);
        t.add_row({double(n), res});
    }
    r.results["max_residual"] = worst;
    r.results["damped"] = !law.critical;
    r.checks.push_back(check_at_most("residual", worst, c.get_double("tolerance", 1e-10)));
    r.tables.push_back(std::move(t));
    return r;
}

std::vector<LevyTriple> target_list(const ExperimentConfig& c) {
    std::vector<LevyTriple> out;
    for (const auto& name : c.get_list("targets", {"feller", "delta1", "killing", "stable"})) {
        try {
            out.push_back(levy::named_triple(name));
        } catch (const std::invalid_argument& e) {
            throw ConfigError(e.what());
        }
    }
    return out;
}

universal::PackedTriple build_packing(const ExperimentConfig& c, const std::vector<double>& grid) {
    const unsigned k_max = get_unsigned(c, "k_max", 4);
    if (k_max < 1 || k_max > 4) throw ConfigError("k_max must lie in 1..4");
    try {
        return universal::pack(universal::dense_targets(target_list(c), k_max),
                               universal::make_schedule(c.get_double("c", 1.0), k_max), grid);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
}

RunResult universal_build(const ExperimentConfig& c) {
    RunResult r;
    const auto grid = c.get_grid("q_grid", measure::default_q_grid());
    const auto packed = build_packing(c, grid);
    const auto& s = packed.schedule;
    CsvTable t("universal_build", {"k", "c_k", "b_k", "head_bound", "tail_bound", "recovery_gap"});
    json speeds = json::array(), dils = json::array(), heads = json::array();
    for (unsigned k = 1; k <= s.k_max; ++k) {
        const double gap = packed.recovery_gap(k, grid);
        t.add_row({double(k), s.speeds[k], s.dilations[k], s.head_bounds[k], s.tail_bounds[k], gap});
        speeds.push_back(s.speeds[k]);
        dils.push_back(s.dilations[k]);
        heads.push_back(s.head_bounds[k]);
        r.checks.push_back(check_at_most("head_bound_k" + std::to_string(k), s.head_bounds[k], 1.0 / k));
    }
    const auto law = universal::universal_family_law(packed.lambda_star.jumps);
    r.results["c_k"] = speeds;
    r.results["b_k"] = dils;
    r.results["head_bounds"] = heads;
    r.results["weighted_sum"] = s.weighted_sum();
    r.results["phi_star_q_max"] = packed.phi_star(packed.q_max);
    r.results["family_law"] = {{"p0", law.p0}, {"p1", law.p1}, {"mean", law.mean()}, {"sizes", law.upper.size()}};
    r.checks.push_back(check_at_most("criticality", std::abs(law.mean() - 1.0), 1e-12));
    CsvTable lt("universal_law", {"size", "probability"});
    lt.add_row({0.0, law.p0});
    lt.add_row({1.0, law.p1});
    for (const auto& a : law.upper) lt.add_row({a.location, a.weight});
    r.tables.push_back(std::move(t));
    r.tables.push_back(std::move(lt));
    return r;
}

RunResult universal_demo(const ExperimentConfig& c) {
    RunResult r;
    const auto grid = c.get_grid("q_grid", measure::default_q_grid());
    const auto times = c.get_grid("t_grid", {0.0, 0.5, 1.0, 2.0});
    const auto packed = build_packing(c, grid);
    const auto& fam = packed.family;
    const auto names = c.get_list("targets", {"feller", "delta1", "killing", "stable"});
    CsvTable t("universal_demo", {"target", "k", "kappa_distance", "bernstein_gap", "csbp_sup_gap"});
    for (std::size_t i = 0; i < fam.targets.size(); ++i) {
        const auto& sub = fam.subsequences[i];
        if (sub.empty()) continue;
        const auto demo = universal::universality_demo(packed, fam.targets[i], sub, grid);
        const auto csbp = universal::universal_csbp_demo(packed, fam.targets[i], sub, grid, times);
        std::vector<double> dist;
        for (std::size_t m = 0; m < demo.size(); ++m) {
            t.add_row({names[i], std::to_string(demo[m].k), format_number(demo[m].kappa_distance),
                       format_number(demo[m].bernstein_gap), format_number(csbp[m].sup_gap)});
            dist.push_back(demo[m].kappa_distance);
        }
        if (dist.size() >= 2) {
            r.checks.push_back(check_true("kappa_decreasing_" + names[i], levy::is_decreasing(dist)));
        }
    }
    r.results["targets"] = fam.targets.size();
    r.tables.push_back(std::move(t));
    return r;
}

std::vector<LevyTriple> named_sequence(const std::string& name, unsigned length) {
    std::vector<LevyTriple> out;
    for (unsigned k = 1; k <= length; ++k) {
        const double x = static_cast<double>(k);
        if (name == "to-zero") {
            out.emplace_back(0.0, 0.0, measure::AtomicMeasure({{1.0 / x, x}}));
        } else if (name == "to-infinity") {
            out.emplace_back(0.0, 0.0, measure::AtomicMeasure({{x, 1.0}}));
        } else if (name == "constant") {
            out.emplace_back(1.0, 0.0);
        } else if (name == "binary-rescaled") {
            out.emplace_back(0.0, 0.0,
                             scaling::rescaled_levy_measure(gw::named_law("binary"), scaling::Rescaling::dyadic(int(k))));
        } else {
            throw ConfigError("unknown sequence: " + name);
        }
    }
    return out;
}

RunResult continuity(const ExperimentConfig& c) {
    RunResult r;
    const std::string seq = c.get_string("sequence", "to-zero");
    const unsigned length = get_unsigned(c, "length", 8);
    if (length < 3) throw ConfigError("length must be at least 3");
    const auto grid = c.get_grid("q_grid", measure::default_q_grid());
    const auto ts = named_sequence(seq, length);
    std::optional<LevyTriple> lim;
    if (c.has("limit")) lim = triple_setting(c, "limit", "feller");
    const auto rep = levy::continuity_report(ts, grid, lim);
    CsvTable t("continuity", {"k", "bernstein_gap", "kappa_gap", "mechanism_gap", "left_right_gap"});
    for (std::size_t i = 0; i < rep.rows.size(); ++i) {
        const auto& row = rep.rows[i];
        t.add_row({double(i + 1), row.bernstein_gap, row.kappa_gap, row.mechanism_gap, row.left_right_gap});
    }
    r.results["sequence"] = seq;
    r.results["limit"] = {{"alpha0", rep.limit.alpha0},
                          {"alpha_inf", rep.limit.alpha_inf},
                          {"atoms", rep.limit.jumps.size()},
                          {"supplied", rep.limit_supplied}};
    r.checks.push_back(check_true("bernstein_decreasing", rep.bernstein_decreasing));
    r.checks.push_back(check_true("kappa_decreasing", rep.kappa_decreasing));
    r.checks.push_back(check_true("mechanism_decreasing", rep.mechanism_decreasing));
    r.checks.push_back(check_true("left_right_decreasing", rep.left_right_decreasing));
    r.tables.push_back(std::move(t));
    return r;
}

RunResult verify(const ExperimentConfig& c) {
    const std::string key = c.get_string("criterion", "");
    if (key.empty()) throw ConfigError("verify needs a criterion name");
    const CriterionInfo* info = nullptr;
    try {
        info = &find_criterion(key);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    CriterionOptions opt;
    opt.seed = c.get_seed(opt.seed);
    opt.threads = get_unsigned(c, "threads", 1);
    return run_criterion(*info, opt);
}

using Runner = RunResult (*)(const ExperimentConfig&);

const std::vector<std::pair<std::string, Runner>>& registry() {
    static const std::vector<std::pair<std::string, Runner>> entries{
        {"evolve", evolve},
        {"simulate", simulate},
        {"limit", limit},
        {"grimvall", grimvall},
        {"smol-residual", smol_residual},
        {"universal-build", universal_build},
        {"universal-demo", universal_demo},
        {"continuity", continuity},
        {"verify", verify},
    };
    return entries;
}

}  // namespace

std::vector<std::string> experiment_names() {
    std::vector<std::string> out;
    for (const auto& e : registry()) out.push_back(e.first);
    return out;
}

bool is_experiment(const std::string& name) {
    const auto names = experiment_names();
    return std::find(names.begin(), names.end(), name) != names.end();
}

RunResult run_experiment(const ExperimentConfig& config) {
    for (const auto& [name, run] : registry()) {
        if (name != config.experiment) continue;
        RunResult r;
        try {
            r = run(config);
        } catch (const std::invalid_argument& e) {
            throw ConfigError(e.what());
        }
        if (name != "verify") {
            r.experiment = name;
            r.config = echo(config);
        } else {
            r.config["echo"] = echo(config);
        }
        return r;
    }
    throw ConfigError("unknown experiment: " + config.experiment);
}

int exit_code(const RunResult& r) { return r.all_pass() ? 0 : 2; }

}  // namespace branchlab::cli
