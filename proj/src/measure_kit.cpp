#include "branchlab/measure_kit.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace branchlab::measure {

DiscreteDistribution::DiscreteDistribution() : masses_{1.0}, tail_mass_(0.0) {}

DiscreteDistribution::DiscreteDistribution(std::vector<double> masses, double tail_mass)
    : masses_(std::move(masses)), tail_mass_(tail_mass) {
    if (masses_.empty()) {
        throw std::invalid_argument("DiscreteDistribution: empty mass vector");
    }
    double sum = tail_mass_;
    for (double m : masses_) {
        if (!(m >= 0.0) || !std::isfinite(m)) {
            throw std::invalid_argument("DiscreteDistribution: masses must be finite and nonnegative");
        }
        sum += m;
    }
    if (!(tail_mass_ >= 0.0)) {
        throw std::invalid_argument("DiscreteDistribution: negative tail mass");
    }
    if (std::abs(sum - 1.0) > 1e-10) {
        throw std::invalid_argument("DiscreteDistribution: masses sum to " + std::to_string(sum));
    }
}

DiscreteDistribution DiscreteDistribution::point_mass(std::size_t index) {
    std::vector<double> m(index + 1, 0.0);
    m[index] = 1.0;
    return DiscreteDistribution(std::move(m));
}

double DiscreteDistribution::operator[](std::size_t index) const {
    return index < masses_.size() ? masses_[index] : 0.0;
}

double DiscreteDistribution::total() const {
    double s = 0.0;
    for (double m : masses_) s += m;
    return s + tail_mass_;
}

double DiscreteDistribution::mean() const {
    double s = 0.0;
    for (std::size_t i = 1; i < masses_.size(); ++i) s += static_cast<double>(i) * masses_[i];
    return s;
}

std::size_t DiscreteDistribution::last_nonzero() const {
    std::size_t last = 0;
    for (std::size_t i = 0; i < masses_.size(); ++i) {
        if (masses_[i] > 0.0) last = i;
    }
    return last;
}

DiscreteDistribution convolve(const DiscreteDistribution& a, const DiscreteDistribution& b,
                              std::size_t cap) {
    const auto& am = a.masses();
    const auto& bm = b.masses();
    const std::size_t alen = a.last_nonzero() + 1;
    const std::size_t blen = b.last_nonzero() + 1;
    const std::size_t out_len = std::min(cap + 1, alen + blen - 1);

    std::vector<double> b_suffix(blen + 1, 0.0);
    for (std::size_t i = blen; i-- > 0;) b_suffix[i] = b_suffix[i + 1] + bm[i];
    double a_kept = 0.0;
    for (std::size_t i = 0; i < alen; ++i) a_kept += am[i];

    std::vector<double> out(std::max<std::size_t>(out_len, 1), 0.0);
    double dropped = 0.0;
    for (std::size_t i = 0; i < alen; ++i) {
        const double ai = am[i];
        if (ai == 0.0) continue;
        if (i > cap) {
            dropped += ai * b_suffix[0];
            continue;
        }
        const std::size_t room = cap - i;
        const std::size_t upto = std::min(blen, room + 1);
        for (std::size_t m = 0; m < upto; ++m) out[i + m] += ai * bm[m];
        if (upto < blen) dropped += ai * b_suffix[upto];
    }
    dropped += a.tail_mass() * (b_suffix[0] + b.tail_mass()) + b.tail_mass() * a_kept;
    return DiscreteDistribution(std::move(out), dropped);
}

DiscreteDistribution convolve_power(const DiscreteDistribution& p, unsigned power, std::size_t cap) {
    DiscreteDistribution result = DiscreteDistribution::point_mass(0);
    for (unsigned i = 0; i < power; ++i) result = convolve(result, p, cap);
    return result;
}

double total_variation(const DiscreteDistribution& a, const DiscreteDistribution& b) {
    const std::size_t len = std::max(a.masses().size(), b.masses().size());
    double s = 0.0;
    for (std::size_t i = 0; i < len; ++i) s += std::abs(a[i] - b[i]);
    s += std::abs(a.tail_mass() - b.tail_mass());
    return std::min(1.0, 0.5 * s);
}

DiscreteDistribution empirical_distribution(const std::vector<std::uint64_t>& samples) {
    if (samples.empty()) throw std::invalid_argument("empirical_distribution: no samples");
    const std::uint64_t top = *std::max_element(samples.begin(), samples.end());
    std::vector<double> counts(static_cast<std::size_t>(top) + 1, 0.0);
    for (auto s : samples) counts[static_cast<std::size_t>(s)] += 1.0;
    const double n = static_cast<double>(samples.size());
    for (double& c : counts) c /= n;
    return DiscreteDistribution(std::move(counts));
}

AtomicMeasure::AtomicMeasure(std::vector<Atom> atoms) {
    for (const auto& a : atoms) {
        if (!(a.location > 0.0) || !std::isfinite(a.location)) {
            throw std::invalid_argument("AtomicMeasure: locations must be finite and positive");
        }
        if (!(a.weight >= 0.0) || !std::isfinite(a.weight)) {
            throw std::invalid_argument("AtomicMeasure: weights must be finite and nonnegative");
        }
    }
    std::sort(atoms.begin(), atoms.end(),
              [](const Atom& l, const Atom& r) { return l.location < r.location; });
    for (const auto& a : atoms) {
        if (a.weight == 0.0) continue;
        if (!atoms_.empty() && a.location - atoms_.back().location <= 1e-15) {
            atoms_.back().weight += a.weight;
        } else {
            atoms_.push_back(a);
        }
    }
}

double AtomicMeasure::total_mass() const {
    double s = 0.0;
    for (const auto& a : atoms_) s += a.weight;
    return s;
}

double AtomicMeasure::mass_between(double lo, double hi) const {
    double s = 0.0;
    for (const auto& a : atoms_) {
        if (a.location > lo && a.location <= hi) s += a.weight;
    }
    return s;
}

double AtomicMeasure::mass_above(double x) const {
    double s = 0.0;
    for (const auto& a : atoms_) {
        if (a.location > x) s += a.weight;
    }
    return s;
}

double integrate(const AtomicMeasure& m, const std::function<double(double)>& f) {
    double s = 0.0;
    for (const auto& a : m.atoms()) {
        const double v = f(a.location);
        if (!std::isfinite(v)) {
            throw std::domain_error("integrate: integrand not finite at x = " + std::to_string(a.location));
        }
        s += a.weight * v;
    }
    return s;
}

double CompactifiedMeasure::total_mass() const {
    return mass_at_zero + mass_at_infinity + interior.total_mass();
}

double bernstein_test_pairing(const CompactifiedMeasure& m, double arg) {
    double s = arg * m.mass_at_zero + m.mass_at_infinity;
    for (const auto& a : m.interior.atoms()) {
        s += a.weight * -std::expm1(-arg * a.location) / std::min(a.location, 1.0);
    }
    return s;
}

double kappa_distance(const CompactifiedMeasure& a, const CompactifiedMeasure& b,
                      const std::vector<double>& q_grid) {
    if (q_grid.empty()) throw std::invalid_argument("kappa_distance: empty grid");
    double sup = 0.0;
    for (double arg : q_grid) {
        if (!(arg > 0.0)) throw std::invalid_argument("kappa_distance: grid must be positive");
        sup = std::max(sup, std::abs(bernstein_test_pairing(a, arg) - bernstein_test_pairing(b, arg)));
    }
    return std::abs(a.total_mass() - b.total_mass()) + sup;
}

std::vector<double> log_grid(double lo, double hi, std::size_t count) {
    if (!(lo > 0.0) || !(hi >= lo) || count == 0) {
        throw std::invalid_argument("log_grid: need 0 < lo <= hi and count >= 1");
    }
    std::vector<double> g(count);
    if (count == 1) {
        g[0] = lo;
        return g;
    }
    const double span = std::log(hi / lo);
    for (std::size_t i = 0; i < count; ++i) {
        g[i] = lo * std::exp(span * static_cast<double>(i) / static_cast<double>(count - 1));
    }
    g.front() = lo;
    g.back() = hi;
    return g;
}

std::vector<double> default_q_grid() {
    std::vector<double> g(41);
    for (std::size_t i = 0; i < g.size(); ++i) g[i] = std::exp2(-10.0 + 0.5 * static_cast<double>(i));
    return g;
}

}  // namespace branchlab::measure
