#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "branchlab/measure_kit.hpp"

namespace branchlab::gw {

using measure::DiscreteDistribution;

struct FamilyLaw {
    DiscreteDistribution dist;
    double mean = 1.0;
    bool critical = true;

    std::size_t max_size() const { return dist.last_nonzero(); }
};

FamilyLaw make_family_law(const std::vector<double>& weights);
// unit, binary, ternary, subcritical-demo
FamilyLaw named_law(const std::string& name);
std::vector<std::string> law_names();

struct CoagulationEnsemble {
    std::vector<std::uint64_t> clusters;
    unsigned step = 0;
    std::uint64_t seed = 0;
    FamilyLaw law;
};

CoagulationEnsemble simulate_coagulation(const FamilyLaw& law, unsigned n_steps, std::size_t n_clusters,
                                         std::uint64_t seed);

struct GWPath {
    std::vector<std::uint64_t> populations;
    bool overflow = false;
};

struct GWSample {
    std::vector<GWPath> paths;
    std::uint64_t seed = 0;
    FamilyLaw law;

    // Populations of generation n over all paths that did not overflow.
    std::vector<std::uint64_t> generation(unsigned n) const;
};

constexpr std::uint64_t kPopulationLimit = 0x7FFFFFFFFFFFFFFFULL;

GWSample simulate_gw(const FamilyLaw& law, unsigned n_gens, std::size_t n_paths, std::uint64_t seed,
                     std::uint64_t initial = 1, unsigned threads = 1,
                     std::uint64_t population_limit = kPopulationLimit);
GWSample lamperti_gw(const FamilyLaw& law, std::uint64_t x0, unsigned n_gens, std::size_t n_paths,
                     std::uint64_t seed, unsigned threads = 1, std::uint64_t clock_limit = kPopulationLimit);

DiscreteDistribution descendant_distribution(const FamilyLaw& law, unsigned n, std::size_t cap = 4096);
// All of nu_0 .. nu_n.
std::vector<DiscreteDistribution> descendant_sequence(const FamilyLaw& law, unsigned n, std::size_t cap = 4096);

double generating_function(const FamilyLaw& law, double z);
double generating_iterate(const FamilyLaw& law, unsigned n, double z);
double discrete_bernstein(const DiscreteDistribution& nu, double arg);
double discrete_mechanism(const FamilyLaw& law, double s);

struct RateCheck {
    std::vector<double> binomial;    // index k holds the rate for k-fold mergers; 0 and 1 unused
    std::vector<double> derivative;
    double max_disagreement = 0.0;
};
RateCheck discrete_rates_checked(const FamilyLaw& law, double rho, unsigned kmax);
std::vector<double> discrete_rates(const FamilyLaw& law, double rho, unsigned kmax);

double smoluchowski_residual(const FamilyLaw& law, unsigned n, std::size_t cap);
double bernstein_step_residual(const FamilyLaw& law, unsigned n, const std::vector<double>& q_grid);

namespace detail {
// (1-s)^j - 1 + j s, accurate for small s.
double binomial_remainder(double size, double s);
}

}  // namespace branchlab::gw
