#pragma once

#include <cstddef>
#include <vector>

#include "branchlab/gw_discrete.hpp"
#include "branchlab/levy_core.hpp"

namespace branchlab::universal {

using levy::LevyTriple;
using measure::AtomicMeasure;

// Speeds scale * exp(k^2) for k = 1..k_max (index 0 unused) and their summary bounds.
struct UniversalSchedule {
    double scale = 1.0;
    unsigned k_max = 4;
    std::vector<double> speeds;
    std::vector<double> dilations;       // filled by pack()
    std::vector<double> head_bounds;     // filled by pack()
    std::vector<double> tail_bounds;     // speeds[k] * sum_{j>k} j / speeds[j]
    double partial_sum = 0.0;            // sum_{j<=6} j / speeds[j]
    double remainder_bound = 0.0;        // bound on sum_{j>6} j / speeds[j]
    bool family_law_ready = false;       // partial_sum + remainder_bound < 1/2

    double weighted_sum() const { return partial_sum + remainder_bound; }
};

UniversalSchedule make_schedule(double scale, unsigned k_max = 4);

struct DenseTargetFamily {
    std::vector<LevyTriple> targets;
    std::vector<LevyTriple> members;          // index k = 1..k_max, index 0 unused
    std::vector<std::size_t> target_of;       // member k approximates targets[target_of[k]]
    std::vector<std::vector<unsigned>> subsequences;  // per target, increasing member indices
};

// Finite-mass approximation of `target` with total mass at most `budget`.
LevyTriple dense_member(const LevyTriple& target, double budget, unsigned k);
DenseTargetFamily dense_targets(const std::vector<LevyTriple>& triples, unsigned k_max = 4);

struct PackedTriple {
    UniversalSchedule schedule;
    DenseTargetFamily family;
    LevyTriple lambda_star;
    double q_max = 0.0;

    // sum_j bernstein(member_j, dilation_j * arg) / speed_j
    double phi_star(double arg) const;
    // sup over the grid of |speed_k phi_star(arg / dilation_k) - bernstein(member_k, arg)|
    double recovery_gap(unsigned k, const std::vector<double>& q_grid) const;
};

PackedTriple pack(const DenseTargetFamily& family, UniversalSchedule schedule, const std::vector<double>& q_grid);

// Family law from a finite measure of mass < 1/2; sizes may exceed any integer type,
// so the law is kept sparse with sizes stored as doubles.
struct UniversalFamilyLaw {
    double p0 = 0.0;
    double p1 = 1.0;
    std::vector<measure::Atom> upper;  // (size j >= 2, probability), increasing size

    double total() const;
    double mean() const;
    // Coarse-grained measure: mass (j - 1) * p_j at location j.
    AtomicMeasure coarse_measure() const;
    // Right distribution function of the coarse-grained measure: mass strictly above z.
    double coarse_right(double z) const;
    // Dense conversion, available when the largest size is at most `cap`.
    gw::FamilyLaw to_family_law(std::size_t cap = 1u << 20) const;
};

UniversalFamilyLaw universal_family_law(const AtomicMeasure& mu_star);

struct DemoRow {
    unsigned k = 0;
    double kappa_distance = 0.0;
    double bernstein_gap = 0.0;
};
std::vector<DemoRow> universality_demo(const PackedTriple& packed, const LevyTriple& target,
                                       const std::vector<unsigned>& subsequence, const std::vector<double>& q_grid);

struct CsbpRow {
    unsigned k = 0;
    double sup_gap = 0.0;
    double zero_time_gap = 0.0;
};
std::vector<CsbpRow> universal_csbp_demo(const PackedTriple& packed, const LevyTriple& target,
                                         const std::vector<unsigned>& subsequence, const std::vector<double>& q_grid,
                                         const std::vector<double>& t_grid);

}  // namespace branchlab::universal
