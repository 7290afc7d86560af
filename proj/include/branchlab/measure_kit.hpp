#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

namespace branchlab::measure {

// Probability masses on 0..cap() with the mass lost beyond cap() kept in tail_mass().
class DiscreteDistribution {
public:
    DiscreteDistribution();
    explicit DiscreteDistribution(std::vector<double> masses, double tail_mass = 0.0);

    static DiscreteDistribution point_mass(std::size_t index);

    const std::vector<double>& masses() const { return masses_; }
    double tail_mass() const { return tail_mass_; }
    std::size_t cap() const { return masses_.size() - 1; }

    double operator[](std::size_t index) const;
    double total() const;
    double mean() const;
    // Index of the last strictly positive mass.
    std::size_t last_nonzero() const;
    bool tail_exceeds(double budget) const { return tail_mass_ > budget; }

private:
    std::vector<double> masses_;
    double tail_mass_;
};

// Product of two truncated distributions, recomputed without mass checks.
DiscreteDistribution convolve(const DiscreteDistribution& a, const DiscreteDistribution& b,
                              std::size_t cap);
DiscreteDistribution convolve_power(const DiscreteDistribution& p, unsigned power, std::size_t cap);
double total_variation(const DiscreteDistribution& a, const DiscreteDistribution& b);
DiscreteDistribution empirical_distribution(const std::vector<std::uint64_t>& samples);

struct Atom {
    double location;
    double weight;
};

// Finite measure on (0, inf) with sorted, distinct, positive atoms.
class AtomicMeasure {
public:
    AtomicMeasure() = default;
    // Sorts, merges locations closer than 1e-15 and drops zero weights.
    explicit AtomicMeasure(std::vector<Atom> atoms);

    const std::vector<Atom>& atoms() const { return atoms_; }
    bool empty() const { return atoms_.empty(); }
    std::size_t size() const { return atoms_.size(); }
    double total_mass() const;
    // Mass of (lo, hi].
    double mass_between(double lo, double hi) const;
    double mass_above(double x) const;

private:
    std::vector<Atom> atoms_;
};

double integrate(const AtomicMeasure& m, const std::function<double(double)>& f);

struct CompactifiedMeasure {
    double mass_at_zero = 0.0;
    double mass_at_infinity = 0.0;
    AtomicMeasure interior;

    double total_mass() const;
};

// Pairing with g(x) = (1 - exp(-arg x)) / min(x, 1), g(0) = arg, g(inf) = 1.
double bernstein_test_pairing(const CompactifiedMeasure& m, double arg);
double kappa_distance(const CompactifiedMeasure& a, const CompactifiedMeasure& b,
                      const std::vector<double>& q_grid);

std::vector<double> log_grid(double lo, double hi, std::size_t count);
// 41 points, geometric, from 2^-10 to 2^10.
std::vector<double> default_q_grid();

}  // namespace branchlab::measure
