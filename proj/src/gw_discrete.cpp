#include "branchlab/gw_discrete.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "branchlab/counter_rng.hpp"

namespace branchlab::gw {

namespace {

constexpr std::uint64_t kCoagulationTag = 0xC0A6ULL;
constexpr std::uint64_t kGenerationTag = 0x6E57ULL;
constexpr std::uint64_t kLampertiTag = 0x1A3BULL;

class SizeSampler {
public:
    explicit SizeSampler(const FamilyLaw& law) {
        double acc = 0.0;
        const auto& m = law.dist.masses();
        top_ = law.max_size();
        cdf_.reserve(top_ + 1);
        for (std::size_t i = 0; i <= top_; ++i) {
            acc += m[i];
            cdf_.push_back(acc);
        }
    }

    std::uint64_t operator()(double u) const {
        const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u * cdf_.back());
        const auto idx = static_cast<std::size_t>(it - cdf_.begin());
        return std::min(idx, top_);
    }

private:
    std::vector<double> cdf_;
    std::size_t top_ = 0;
};

template <typename Fn>
void for_each_path(std::size_t n_paths, unsigned threads, Fn&& fn) {
    threads = std::max(1u, threads);
    if (threads == 1 || n_paths < 2) {
        for (std::size_t p = 0; p < n_paths; ++p) fn(p);
        return;
    }
    std::vector<std::thread> pool;
    const std::size_t chunk = (n_paths + threads - 1) / threads;
    for (unsigned w = 0; w < threads; ++w) {
        const std::size_t begin = w * chunk;
        const std::size_t end = std::min(n_paths, begin + chunk);
        if (begin >= end) break;
        pool.emplace_back([begin, end, &fn] {
            for (std::size_t p = begin; p < end; ++p) fn(p);
        });
    }
    for (auto& t : pool) t.join();
}

std::size_t safe_cap(const FamilyLaw& law, unsigned n) {
    const std::size_t top = std::max<std::size_t>(1, law.max_size());
    std::size_t cap = 1;
    for (unsigned i = 0; i < n; ++i) {
        if (cap > (std::size_t{1} << 22) / top) return std::size_t{1} << 22;
        cap *= top;
    }
    return cap;
}

}  // namespace

FamilyLaw make_family_law(const std::vector<double>& weights) {
    if (weights.empty()) throw std::invalid_argument("make_family_law: no weights");
    double sum = 0.0;
    double mean = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        if (!(weights[i] >= 0.0) || !std::isfinite(weights[i])) {
            throw std::invalid_argument("make_family_law: weights must be finite and nonnegative");
        }
        sum += weights[i];
        mean += static_cast<double>(i) * weights[i];
    }
    if (std::abs(sum - 1.0) > 1e-12) {
        throw std::invalid_argument("make_family_law: weights must sum to 1");
    }
    FamilyLaw law{DiscreteDistribution(weights), mean, std::abs(mean - 1.0) <= 1e-12};
    return law;
}

FamilyLaw named_law(const std::string& name) {
    if (name == "unit") return make_family_law({0.0, 1.0});
    if (name == "binary") return make_family_law({0.5, 0.0, 0.5});
    if (name == "ternary") return make_family_law({2.0 / 3.0, 0.0, 0.0, 1.0 / 3.0});
    if (name == "subcritical-demo") return make_family_law({0.75, 0.0, 0.25});
    throw std::invalid_argument("unknown law name: " + name);
}

std::vector<std::string> law_names() { return {"unit", "binary", "ternary", "subcritical-demo"}; }

CoagulationEnsemble simulate_coagulation(const FamilyLaw& law, unsigned n_steps, std::size_t n_clusters,
                                         std::uint64_t seed) {
    if (n_clusters == 0) throw std::invalid_argument("simulate_coagulation: need at least one cluster");
    if (!(law.mean > 0.0)) throw std::invalid_argument("simulate_coagulation: law has zero mean");
    const SizeSampler draw(law);
    std::vector<std::uint64_t> current(n_clusters, 1);
    for (unsigned step = 1; step <= n_steps; ++step) {
        rng::CounterRng gen(seed, rng::derive_stream(kCoagulationTag, step));
        std::vector<std::uint64_t> next;
        next.reserve(static_cast<std::size_t>(static_cast<double>(current.size()) / law.mean) + 16);
        std::size_t pos = 0;
        for (;;) {
            const std::uint64_t group = draw(gen.uniform());
            if (group > current.size() - pos) break;
            std::uint64_t total = 0;
            for (std::uint64_t i = 0; i < group; ++i) total += current[pos + i];
            pos += group;
            next.push_back(total);
        }
        current = std::move(next);
        if (current.empty()) break;
    }
    return CoagulationEnsemble{std::move(current), n_steps, seed, law};
}

std::vector<std::uint64_t> GWSample::generation(unsigned n) const {
    std::vector<std::uint64_t> out;
    out.reserve(paths.size());
    for (const auto& p : paths) {
        if (!p.overflow && p.populations.size() > n) out.push_back(p.populations[n]);
    }
    return out;
}

GWSample simulate_gw(const FamilyLaw& law, unsigned n_gens, std::size_t n_paths, std::uint64_t seed,
                     std::uint64_t initial, unsigned threads, std::uint64_t population_limit) {
    const SizeSampler draw(law);
    GWSample sample{std::vector<GWPath>(n_paths), seed, law};
    for_each_path(n_paths, threads, [&](std::size_t p) {
        GWPath& path = sample.paths[p];
        path.populations.reserve(n_gens + 1);
        path.populations.push_back(initial);
        for (unsigned g = 0; g < n_gens; ++g) {
            const std::uint64_t current = path.populations.back();
            rng::CounterRng gen(seed, rng::derive_stream(rng::derive_stream(kGenerationTag, p), g));
            std::uint64_t total = 0;
            for (std::uint64_t i = 0; i < current; ++i) {
                if (__builtin_add_overflow(total, draw(gen.uniform()), &total) || total > population_limit) {
                    path.overflow = true;
                    return;
                }
            }
            path.populations.push_back(total);
        }
    });
    return sample;
}

GWSample lamperti_gw(const FamilyLaw& law, std::uint64_t x0, unsigned n_gens, std::size_t n_paths,
                     std::uint64_t seed, unsigned threads, std::uint64_t clock_limit) {
    if (x0 < 1) throw std::invalid_argument("lamperti_gw: initial population must be >= 1");
    const SizeSampler draw(law);
    GWSample sample{std::vector<GWPath>(n_paths), seed, law};
    for_each_path(n_paths, threads, [&](std::size_t p) {
        GWPath& path = sample.paths[p];
        rng::CounterRng walk(seed, rng::derive_stream(kLampertiTag, p));
        // position = x0 + walk value at the current clock reading
        std::uint64_t clock = 0;
        std::uint64_t position = x0;
        path.populations.push_back(position);
        for (unsigned g = 0; g < n_gens; ++g) {
            const std::uint64_t advance = position;
            std::uint64_t new_clock = 0;
            if (__builtin_add_overflow(clock, advance, &new_clock) || new_clock > clock_limit) {
                path.overflow = true;
                return;
            }
            // Each increment is (offspring - 1); summing offspring over the block
            // of length `advance` gives the new position directly.
            std::uint64_t total = 0;
            for (std::uint64_t i = 0; i < advance; ++i) {
                if (__builtin_add_overflow(total, draw(walk.uniform()), &total)) {
                    path.overflow = true;
                    return;
                }
            }
            clock = new_clock;
            position = total;
            path.populations.push_back(position);
        }
    });
    return sample;
}

std::vector<DiscreteDistribution> descendant_sequence(const FamilyLaw& law, unsigned n, std::size_t cap) {
    if (cap < 1) throw std::invalid_argument("descendant_sequence: cap must be >= 1");
    std::vector<DiscreteDistribution> seq;
    seq.reserve(n + 1);
    seq.push_back(DiscreteDistribution::point_mass(1));
    const auto& weights = law.dist.masses();
    const std::size_t top = law.max_size();
    for (unsigned step = 0; step < n; ++step) {
        const DiscreteDistribution& prev = seq.back();
        std::vector<double> acc(1, 0.0);
        double tail = 0.0;
        DiscreteDistribution power = DiscreteDistribution::point_mass(0);
        for (std::size_t k = 0; k <= top; ++k) {
            if (k > 0) power = measure::convolve(power, prev, cap);
            const double w = weights[k];
            if (w == 0.0) continue;
            const auto& pm = power.masses();
            if (acc.size() < pm.size()) acc.resize(pm.size(), 0.0);
            for (std::size_t i = 0; i < pm.size(); ++i) acc[i] += w * pm[i];
            tail += w * power.tail_mass();
        }
        seq.emplace_back(std::move(acc), tail);
    }
    return seq;
}

DiscreteDistribution descendant_distribution(const FamilyLaw& law, unsigned n, std::size_t cap) {
    return descendant_sequence(law, n, cap).back();
}

double generating_function(const FamilyLaw& law, double z) {
    const auto& m = law.dist.masses();
    double acc = 0.0;
    for (std::size_t i = m.size(); i-- > 0;) acc = acc * z + m[i];
    return acc;
}

double generating_iterate(const FamilyLaw& law, unsigned n, double z) {
    if (!(z >= 0.0 && z <= 1.0)) throw std::invalid_argument("generating_iterate: z must lie in [0, 1]");
    for (unsigned i = 0; i < n; ++i) z = generating_function(law, z);
    return z;
}

double discrete_bernstein(const DiscreteDistribution& nu, double arg) {
    if (!(arg >= 0.0)) throw std::invalid_argument("discrete_bernstein: argument must be nonnegative");
    const auto& m = nu.masses();
    double s = 0.0;
    for (std::size_t i = 1; i < m.size(); ++i) {
        if (m[i] != 0.0) s += m[i] * -std::expm1(-arg * static_cast<double>(i));
    }
    // tail sits somewhere beyond cap(); count it at the first index past the cap
    s += nu.tail_mass() * -std::expm1(-arg * static_cast<double>(m.size()));
    return s;
}

namespace detail {

double binomial_remainder(double size, double s) {
    if (size < 2.0) return 0.0;
    if (size <= 64.0) {
        // s^2 * sum_{l=0}^{size-2} (size-1-l) (1-s)^l, all terms nonnegative
        const double base = 1.0 - s;
        double acc = 0.0;
        for (double l = size - 2.0; l >= 0.0; l -= 1.0) acc = acc * base + (size - 1.0 - l);
        return s * s * acc;
    }
    if (size * s <= 0.5) {
        double term = -size * s;
        double sum = 0.0;
        for (double m = 2.0; m <= size; m += 1.0) {
            term *= -s * (size - m + 1.0) / m;
            sum += term;
            if (std::abs(term) <= 1e-18 * std::abs(sum)) break;
        }
        return sum;
    }
    return std::pow(1.0 - s, size) - 1.0 + size * s;
}

}  // namespace detail

double discrete_mechanism(const FamilyLaw& law, double s) {
    if (!(s >= 0.0 && s <= 1.0)) throw std::invalid_argument("discrete_mechanism: s must lie in [0, 1]");
    const auto& m = law.dist.masses();
    double acc = 0.0;
    for (std::size_t i = 2; i < m.size(); ++i) {
        if (m[i] != 0.0) acc += m[i] * detail::binomial_remainder(static_cast<double>(i), s);
    }
    return acc + (1.0 - law.mean) * s;
}

namespace {

double log_choose(double n, double k) {
    return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

}  // namespace

RateCheck discrete_rates_checked(const FamilyLaw& law, double rho, unsigned kmax) {
    if (!(rho > 0.0 && rho <= 1.0)) throw std::invalid_argument("discrete_rates: rho must lie in (0, 1]");
    const auto& m = law.dist.masses();
    const double z = 1.0 - rho;
    RateCheck out;
    out.binomial.assign(kmax + 1, 0.0);
    out.derivative.assign(kmax + 1, 0.0);
    for (unsigned k = 2; k <= kmax; ++k) {
        double direct = 0.0;
        for (std::size_t l = k; l < m.size(); ++l) {
            if (m[l] == 0.0) continue;
            const double choose = l <= 60 ? std::round(std::exp(log_choose(double(l), double(k))))
                                          : std::exp(log_choose(double(l), double(k)));
            direct += m[l] * choose * std::pow(rho, double(k)) * std::pow(z, double(l - k));
        }
        out.binomial[k] = direct;

        // k-th derivative of the generating function at 1 - rho by Horner
        double horner = 0.0;
        for (std::size_t l = m.size(); l-- > k;) {
            double falling = 1.0;
            for (unsigned i = 0; i < k; ++i) falling *= static_cast<double>(l - i);
            horner = horner * z + m[l] * falling;
        }
        out.derivative[k] = horner * std::exp(double(k) * std::log(rho) - std::lgamma(double(k) + 1.0));
        out.max_disagreement = std::max(out.max_disagreement, std::abs(out.binomial[k] - out.derivative[k]));
    }
    return out;
}

std::vector<double> discrete_rates(const FamilyLaw& law, double rho, unsigned kmax) {
    return discrete_rates_checked(law, rho, kmax).binomial;
}

double smoluchowski_residual(const FamilyLaw& law, unsigned n, std::size_t cap) {
    const auto seq = descendant_sequence(law, n + 1, cap);
    const DiscreteDistribution& now = seq[n];
    const DiscreteDistribution& next = seq[n + 1];
    if (next.tail_mass() > 0.0) {
        throw std::domain_error("smoluchowski_residual: unsafe truncation, increase the cap");
    }
    const double rho = 1.0 - now[0];
    double worst = 0.0;
    if (!(rho > 0.0)) {
        for (std::size_t j = 1; j <= cap; ++j) worst = std::max(worst, std::abs(next[j] - law.mean * now[j]));
        return worst;
    }
    std::vector<double> normalized(now.masses());
    normalized[0] = 0.0;
    for (double& v : normalized) v /= rho;
    double norm_total = 0.0;
    for (double v : normalized) norm_total += v;
    const DiscreteDistribution restricted(std::move(normalized), std::max(0.0, 1.0 - norm_total));

    const unsigned kmax = static_cast<unsigned>(law.max_size());
    const auto rates = discrete_rates(law, rho, std::max(2u, kmax));
    std::vector<double> rhs(cap + 1, 0.0);
    DiscreteDistribution power = restricted;
    for (unsigned k = 2; k <= kmax; ++k) {
        power = measure::convolve(power, restricted, cap);
        if (rates[k] == 0.0) continue;
        for (std::size_t j = 1; j <= cap; ++j) rhs[j] += rates[k] * (power[j] - k * restricted[j]);
    }
    for (std::size_t j = 1; j <= cap; ++j) {
        const double r = next[j] - now[j] - (law.mean - 1.0) * now[j] - rhs[j];
        worst = std::max(worst, std::abs(r));
    }
    return worst;
}

double bernstein_step_residual(const FamilyLaw& law, unsigned n, const std::vector<double>& q_grid) {
    const auto seq = descendant_sequence(law, n + 1, safe_cap(law, n + 1));
    double worst = 0.0;
    for (double arg : q_grid) {
        const double now = discrete_bernstein(seq[n], arg);
        const double next = discrete_bernstein(seq[n + 1], arg);
        worst = std::max(worst, std::abs(next - now + discrete_mechanism(law, now)));
    }
    return worst;
}

}  // namespace branchlab::gw
