#include "branchlab/universal.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "branchlab/scaling_limits.hpp"

namespace branchlab::universal {

namespace {

constexpr unsigned kPartialTerms = 6;

// sum_{j>=from} j exp(-j^2) * exp(shift), bounded geometrically past `from`
double geometric_tail(unsigned from, double shift) {
    const double first = from * std::exp(shift - double(from) * double(from));
    const double ratio = (from + 1.0) / from * std::exp(-(2.0 * from + 1.0));
    return first / (1.0 - ratio);
}

}  // namespace

UniversalSchedule make_schedule(double scale, unsigned k_max) {
    if (!(scale > 0.0) || !std::isfinite(scale)) throw std::invalid_argument("make_schedule: scale must be positive");
    if (k_max < 1) throw std::invalid_argument("make_schedule: k_max must be >= 1");
    UniversalSchedule s;
    s.scale = scale;
    s.k_max = k_max;
    s.speeds.assign(k_max + 1, 0.0);
    for (unsigned k = 1; k <= k_max; ++k) s.speeds[k] = scale * std::exp(double(k) * double(k));
    for (unsigned j = 1; j <= kPartialTerms; ++j) s.partial_sum += j * std::exp(-double(j) * double(j)) / scale;
    s.remainder_bound = geometric_tail(kPartialTerms + 1, 0.0) / scale;
    if (s.weighted_sum() >= 1.0) {
        throw std::invalid_argument("make_schedule: sum of j / speed_j is not below 1 for scale = " + std::to_string(scale));
    }
    s.family_law_ready = s.weighted_sum() < 0.5;
    s.tail_bounds.assign(k_max + 1, 0.0);
    for (unsigned k = 1; k <= k_max; ++k) {
        const double kk = double(k) * double(k);
        double sum = 0.0;
        const unsigned last = k + 8;
        for (unsigned j = k + 1; j <= last; ++j) sum += j * std::exp(kk - double(j) * double(j));
        s.tail_bounds[k] = sum + geometric_tail(last + 1, kk);
    }
    s.dilations.assign(k_max + 1, 0.0);
    s.head_bounds.assign(k_max + 1, 0.0);
    return s;
}

LevyTriple dense_member(const LevyTriple& target, double budget, unsigned k) {
    if (!(budget > 0.0)) throw std::invalid_argument("dense_member: budget must be positive");
    const int parts = (target.alpha0 > 0.0) + (target.alpha_inf > 0.0) + (!target.jumps.empty());
    const double share = budget / std::max(1, parts);
    std::vector<measure::Atom> atoms;
    if (target.alpha0 > 0.0) {
        const double eps = target.alpha0 / share;
        atoms.push_back({eps, share});
    }
    if (target.alpha_inf > 0.0) {
        atoms.push_back({std::ldexp(1.0, 10 + 2 * static_cast<int>(k)), std::min(target.alpha_inf, share)});
    }
    const auto& mu = target.jumps.atoms();
    double kept = 0.0;
    std::size_t first = mu.size();
    while (first > 0 && kept + mu[first - 1].weight <= share) {
        kept += mu[first - 1].weight;
        --first;
    }
    for (std::size_t i = first; i < mu.size(); ++i) atoms.push_back(mu[i]);
    return LevyTriple(0.0, 0.0, AtomicMeasure(std::move(atoms)));
}

DenseTargetFamily dense_targets(const std::vector<LevyTriple>& triples, unsigned k_max) {
    if (triples.empty()) throw std::invalid_argument("dense_targets: no targets");
    DenseTargetFamily fam;
    fam.targets = triples;
    fam.members.resize(k_max + 1);
    fam.target_of.assign(k_max + 1, 0);
    fam.subsequences.resize(triples.size());
    for (unsigned k = 1; k <= k_max; ++k) {
        const std::size_t which = (k - 1) % triples.size();
        fam.target_of[k] = which;
        fam.members[k] = dense_member(triples[which], double(k), k);
        fam.subsequences[which].push_back(k);
    }
    return fam;
}

double PackedTriple::phi_star(double arg) const {
    double s = 0.0;
    for (unsigned j = 1; j <= schedule.k_max; ++j) {
        s += levy::bernstein_value(family.members[j], schedule.dilations[j] * arg) / schedule.speeds[j];
    }
    return s;
}

double PackedTriple::recovery_gap(unsigned k, const std::vector<double>& q_grid) const {
    double worst = 0.0;
    for (double arg : q_grid) {
        const double lhs = schedule.speeds[k] * phi_star(arg / schedule.dilations[k]);
        worst = std::max(worst, std::abs(lhs - levy::bernstein_value(family.members[k], arg)));
    }
    return worst;
}

PackedTriple pack(const DenseTargetFamily& family, UniversalSchedule schedule, const std::vector<double>& q_grid) {
    if (q_grid.empty()) throw std::invalid_argument("pack: empty grid");
    if (family.members.size() < schedule.k_max + 1) throw std::invalid_argument("pack: too few members");
    const double q_max = *std::max_element(q_grid.begin(), q_grid.end());
    for (unsigned k = 1; k <= schedule.k_max; ++k) {
        const auto& m = family.members[k];
        if (m.alpha0 != 0.0 || m.alpha_inf != 0.0 || m.jumps.total_mass() > k * (1.0 + 1e-12)) {
            throw std::invalid_argument("pack: member " + std::to_string(k) + " is not a finite measure of mass <= k");
        }
    }
    double previous = 1.0;
    for (unsigned k = 1; k <= schedule.k_max; ++k) {
        double dilation = std::exp2(std::ceil(std::log2(previous * schedule.speeds[k])));
        auto head = [&](double candidate) {
            double s = 0.0;
            for (unsigned j = 1; j < k; ++j) {
                s += levy::bernstein_value(family.members[j], schedule.dilations[j] * q_max / candidate) / schedule.speeds[j];
            }
            return schedule.speeds[k] * s;
        };
        const double threshold = std::min(1.0 / k, schedule.tail_bounds[k]);
        double bound = head(dilation);
        while (bound >= threshold) {
            dilation *= 2.0;
            if (!std::isfinite(dilation)) throw std::runtime_error("pack: doubling search exceeded 2^1024");
            bound = head(dilation);
        }
        schedule.dilations[k] = dilation;
        schedule.head_bounds[k] = bound;
        previous = dilation;
    }
    std::vector<measure::Atom> atoms;
    for (unsigned j = 1; j <= schedule.k_max; ++j) {
        for (const auto& a : family.members[j].jumps.atoms()) {
            atoms.push_back({schedule.dilations[j] * a.location, a.weight / schedule.speeds[j]});
        }
    }
    PackedTriple out{std::move(schedule), family, LevyTriple(0.0, 0.0, AtomicMeasure(std::move(atoms))), q_max};
    return out;
}

double UniversalFamilyLaw::total() const {
    double s = p0 + p1;
    for (const auto& a : upper) s += a.weight;
    return s;
}

double UniversalFamilyLaw::mean() const {
    double s = p1;
    for (const auto& a : upper) s += a.location * a.weight;
    return s;
}

AtomicMeasure UniversalFamilyLaw::coarse_measure() const {
    std::vector<measure::Atom> atoms;
    for (const auto& a : upper) atoms.push_back({a.location, (a.location - 1.0) * a.weight});
    return AtomicMeasure(std::move(atoms));
}

double UniversalFamilyLaw::coarse_right(double z) const {
    double s = 0.0;
    for (const auto& a : upper) {
        if (a.location > z) s += (a.location - 1.0) * a.weight;
    }
    return s;
}

gw::FamilyLaw UniversalFamilyLaw::to_family_law(std::size_t cap) const {
    const double top = upper.empty() ? 1.0 : upper.back().location;
    if (top > static_cast<double>(cap)) {
        throw std::length_error("UniversalFamilyLaw: largest size exceeds the dense cap");
    }
    std::vector<double> w(static_cast<std::size_t>(top) + 1, 0.0);
    w[0] = p0;
    w[1] = p1;
    for (const auto& a : upper) w[static_cast<std::size_t>(a.location)] = a.weight;
    return gw::make_family_law(w);
}

UniversalFamilyLaw universal_family_law(const AtomicMeasure& mu_star) {
    if (!(mu_star.total_mass() < 0.5)) {
        throw std::invalid_argument("universal_family_law: total mass must be below 1/2");
    }
    std::map<double, double> bins;
    for (const auto& a : mu_star.atoms()) bins[std::ceil(a.location) + 1.0] += a.weight;
    UniversalFamilyLaw law;
    double weighted = 0.0;
    double plain = 0.0;
    for (const auto& [size, mass] : bins) {
        const double p = mass / (size - 1.0);
        law.upper.push_back({size, p});
        weighted += size * p;
        plain += p;
    }
    law.p1 = 1.0 - weighted;
    law.p0 = 1.0 - law.p1 - plain;
    return law;
}

std::vector<DemoRow> universality_demo(const PackedTriple& packed, const LevyTriple& target,
                                       const std::vector<unsigned>& subsequence, const std::vector<double>& q_grid) {
    const auto ktarget = levy::kappa_of(target);
    std::vector<DemoRow> rows;
    for (unsigned k : subsequence) {
        if (k < 1 || k > packed.schedule.k_max) throw std::invalid_argument("universality_demo: index out of range");
        const LevyTriple scaled = levy::scale_triple(packed.lambda_star, packed.schedule.dilations[k], packed.schedule.speeds[k]);
        DemoRow row{k, measure::kappa_distance(levy::kappa_of(scaled), ktarget, q_grid), 0.0};
        for (double arg : q_grid) {
            row.bernstein_gap = std::max(row.bernstein_gap,
                                         std::abs(levy::bernstein_value(scaled, arg) - levy::bernstein_value(target, arg)));
        }
        rows.push_back(row);
    }
    return rows;
}

std::vector<CsbpRow> universal_csbp_demo(const PackedTriple& packed, const LevyTriple& target,
                                         const std::vector<unsigned>& subsequence, const std::vector<double>& q_grid,
                                         const std::vector<double>& t_grid) {
    auto star_rate = [&packed](double v) { return levy::mechanism(packed.lambda_star, v); };
    auto target_rate = [&target](double v) { return levy::mechanism(target, v); };
    std::vector<std::vector<double>> reference;
    for (double arg : q_grid) reference.push_back(scaling::integrate_exponent(target_rate, arg, t_grid));

    std::vector<CsbpRow> rows;
    for (unsigned k : subsequence) {
        if (k < 1 || k > packed.schedule.k_max) throw std::invalid_argument("universal_csbp_demo: index out of range");
        const double dilation = packed.schedule.dilations[k];
        const double speed = packed.schedule.speeds[k];
        std::vector<double> times;
        for (double time : t_grid) times.push_back(speed * time);
        CsbpRow row{k, 0.0, 0.0};
        for (std::size_t i = 0; i < q_grid.size(); ++i) {
            const auto star = scaling::integrate_exponent(star_rate, q_grid[i] / dilation, times);
            for (std::size_t j = 0; j < t_grid.size(); ++j) {
                const double gap = std::abs(dilation * star[j] - reference[i][j]);
                row.sup_gap = std::max(row.sup_gap, gap);
                if (t_grid[j] == 0.0) row.zero_time_gap = std::max(row.zero_time_gap, gap);
            }
        }
        rows.push_back(row);
    }
    return rows;
}

}  // namespace branchlab::universal
