#include "branchlab/levy_core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace branchlab::levy {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_positive_arg(double arg, const char* who) {
    if (!(arg > 0.0) || std::isnan(arg)) {
        throw std::invalid_argument(std::string(who) + ": argument must be positive");
    }
}

}  // namespace

namespace detail {

double compensated_exponential(double z) {
    if (z < 0.5) {
        double term = 0.5 * z * z;
        double sum = term;
        for (int n = 3; n < 40; ++n) {
            term *= -z / n;
            sum += term;
            if (std::abs(term) <= 1e-18 * std::abs(sum)) break;
        }
        return sum;
    }
    return std::expm1(-z) + z;
}

}  // namespace detail

LevyTriple::LevyTriple(double a0, double ainf, AtomicMeasure mu)
    : alpha0(a0), alpha_inf(ainf), jumps(std::move(mu)) {
    if (!(alpha0 >= 0.0) || !(alpha_inf >= 0.0) || !std::isfinite(alpha0) || !std::isfinite(alpha_inf)) {
        throw std::invalid_argument("LevyTriple: coefficients must be finite and nonnegative");
    }
}

AtomicMeasure QuadratureRecipe::build() const {
    if (!density || !(lo > 0.0) || !(hi > lo) || count == 0) {
        throw std::invalid_argument("QuadratureRecipe: need density, 0 < lo < hi, count >= 1");
    }
    const double log_step = std::log(hi / lo) / static_cast<double>(count);
    std::vector<measure::Atom> atoms;
    atoms.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        const double x = lo * std::exp(log_step * (static_cast<double>(i) + 0.5));
        atoms.push_back({x, density(x) * x * log_step});
    }
    return AtomicMeasure(std::move(atoms));
}

double stable_density(double index, double x) {
    return std::pow(x, -index) / std::tgamma(-index);
}

LevyTriple stable_triple(double index, std::size_t count, double lo, double hi) {
    if (!(index > 1.0 && index < 2.0)) {
        throw std::invalid_argument("stable_triple: index must lie in (1, 2)");
    }
    const double norm = 1.0 / std::tgamma(-index);
    QuadratureRecipe recipe{[index](double x) { return stable_density(index, x); }, lo, hi, count};
    const double below = norm * std::pow(lo, 2.0 - index) / (2.0 - index);
    const double above = norm * std::pow(hi, 1.0 - index) / (index - 1.0);
    return LevyTriple(below, above, recipe.build());
}

LevyTriple named_triple(const std::string& name) {
    if (name == "feller") return LevyTriple(1.0, 0.0);
    if (name == "delta1") return LevyTriple(0.0, 0.0, AtomicMeasure({{1.0, 1.0}}));
    if (name == "killing") return LevyTriple(0.0, 1.0);
    if (name == "stable") return stable_triple(1.5);
    if (name == "zero") return LevyTriple();
    throw std::invalid_argument("unknown triple name: " + name);
}

std::vector<std::string> triple_names() { return {"feller", "delta1", "killing", "stable", "zero"}; }

double bernstein_value(const LevyTriple& t, double arg) {
    require_positive_arg(arg, "bernstein_value");
    double s = t.alpha0 * arg + t.alpha_inf;
    for (const auto& a : t.jumps.atoms()) s += a.weight * -std::expm1(-arg * a.location);
    return s;
}

CompactifiedMeasure kappa_of(const LevyTriple& t) {
    std::vector<measure::Atom> atoms;
    atoms.reserve(t.jumps.size());
    for (const auto& a : t.jumps.atoms()) atoms.push_back({a.location, a.weight * std::min(a.location, 1.0)});
    return CompactifiedMeasure{t.alpha0, t.alpha_inf, AtomicMeasure(std::move(atoms))};
}

LevyTriple triple_of(const CompactifiedMeasure& k) {
    std::vector<measure::Atom> atoms;
    atoms.reserve(k.interior.size());
    for (const auto& a : k.interior.atoms()) atoms.push_back({a.location, a.weight / std::min(a.location, 1.0)});
    return LevyTriple(k.mass_at_zero, k.mass_at_infinity, AtomicMeasure(std::move(atoms)));
}

double mechanism(const LevyTriple& t, double arg) {
    if (!(arg >= 0.0)) throw std::invalid_argument("mechanism: argument must be nonnegative");
    if (arg == 0.0) return 0.0;
    double s = 0.5 * t.alpha0 * arg * arg + t.alpha_inf * arg;
    for (const auto& a : t.jumps.atoms()) {
        s += a.weight / a.location * detail::compensated_exponential(arg * a.location);
    }
    return s;
}

double mechanism_derivative(const LevyTriple& t, double arg, int order) {
    if (order < 1) throw std::invalid_argument("mechanism_derivative: order must be >= 1");
    require_positive_arg(arg, "mechanism_derivative");
    if (order == 1) {
        double s = t.alpha0 * arg + t.alpha_inf;
        for (const auto& a : t.jumps.atoms()) s += a.weight * -std::expm1(-arg * a.location);
        return s;
    }
    double s = order == 2 ? t.alpha0 : 0.0;
    for (const auto& a : t.jumps.atoms()) {
        s += a.weight * std::exp((order - 1) * std::log(a.location) - arg * a.location);
    }
    return order % 2 == 0 ? s : -s;
}

LevyTriple scale_triple(const LevyTriple& t, double dilation, double speed) {
    if (!(dilation > 0.0) || !(speed > 0.0)) {
        throw std::invalid_argument("scale_triple: dilation and speed must be positive");
    }
    std::vector<measure::Atom> atoms;
    atoms.reserve(t.jumps.size());
    for (const auto& a : t.jumps.atoms()) atoms.push_back({a.location / dilation, speed * a.weight});
    return LevyTriple(speed / dilation * t.alpha0, speed * t.alpha_inf, AtomicMeasure(std::move(atoms)));
}

std::pair<double, double> left_right(const LevyTriple& t, double x) {
    double left = t.alpha0;
    double right = t.alpha_inf;
    for (const auto& a : t.jumps.atoms()) {
        if (a.location <= x) {
            left += a.location * a.weight;
        } else {
            right += a.weight;
        }
    }
    return {left, right};
}

namespace {

constexpr double kGreyHorizon = 1e12;
constexpr double kDivergenceExponent = 1.1;

double log_integral(const LevyTriple& t, double lo, double hi) {
    auto integrand = [&t](double s) {
        const double u = std::exp(s);
        return u / mechanism(t, u);
    };
    double err = 0.0;
    return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
        integrand, std::log(lo), std::log(hi), 20, 1e-13, &err);
}

}  // namespace

double inverse_mechanism_integral(const LevyTriple& t, double lo) {
    require_positive_arg(lo, "inverse_mechanism_integral");
    const double top = std::max(kGreyHorizon, 10.0 * lo);
    const double psi_top = mechanism(t, top);
    const double exponent = top * mechanism_derivative(t, top, 1) / psi_top;
    if (exponent <= kDivergenceExponent) return kInf;
    return log_integral(t, lo, top) + top / ((exponent - 1.0) * psi_top);
}

GreyResult grey_check(const LevyTriple& t) {
    if (mechanism(t, 1.0) == 0.0) {
        throw std::domain_error("grey_check: mechanism vanishes identically on [1, inf)");
    }
    GreyResult r;
    const double psi_top = mechanism(t, kGreyHorizon);
    r.tail_exponent = kGreyHorizon * mechanism_derivative(t, kGreyHorizon, 1) / psi_top;
    r.value = inverse_mechanism_integral(t, 1.0);
    r.converges = std::isfinite(r.value);
    return r;
}

double psi_prime_infinity(const LevyTriple& t) {
    if (t.alpha0 > 0.0) return kInf;
    return t.alpha_inf + t.jumps.total_mass();
}

bool is_decreasing(const std::vector<double>& values, double tolerance) {
    if (values.empty()) return true;
    bool all_zero = true;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (values[i] != 0.0) all_zero = false;
        if (i > 0 && values[i] > values[i - 1] + tolerance * std::max(1.0, std::abs(values[i - 1]))) {
            return false;
        }
    }
    return all_zero || values.back() < values.front();
}

namespace {

bool same_triple(const LevyTriple& a, const LevyTriple& b) {
    if (a.alpha0 != b.alpha0 || a.alpha_inf != b.alpha_inf || a.jumps.size() != b.jumps.size()) return false;
    for (std::size_t i = 0; i < a.jumps.size(); ++i) {
        if (a.jumps.atoms()[i].location != b.jumps.atoms()[i].location ||
            a.jumps.atoms()[i].weight != b.jumps.atoms()[i].weight) {
            return false;
        }
    }
    return true;
}

constexpr double kSnap = 0.05;

}  // namespace

LevyTriple estimate_limit(const std::vector<LevyTriple>& ts) {
    if (ts.empty()) throw std::invalid_argument("estimate_limit: empty sequence");
    if (ts.size() < 2) return ts.back();
    const LevyTriple& prev = ts[ts.size() - 2];
    const LevyTriple& last = ts.back();
    if (same_triple(prev, last)) return last;
    const CompactifiedMeasure ka = kappa_of(prev);
    const CompactifiedMeasure kb = kappa_of(last);
    if (ka.interior.size() != kb.interior.size()) return last;

    const double n = static_cast<double>(ts.size());
    auto extrapolate = [n](double older, double newer) { return n * newer - (n - 1.0) * older; };

    double zero = std::max(0.0, extrapolate(ka.mass_at_zero, kb.mass_at_zero));
    double infinity = std::max(0.0, extrapolate(ka.mass_at_infinity, kb.mass_at_infinity));
    std::vector<measure::Atom> interior;
    for (std::size_t i = 0; i < kb.interior.size(); ++i) {
        const auto& a = ka.interior.atoms()[i];
        const auto& b = kb.interior.atoms()[i];
        const double ya = a.location / (1.0 + a.location);
        const double yb = b.location / (1.0 + b.location);
        const double y = std::clamp(extrapolate(ya, yb), 0.0, 1.0);
        const double mass = std::max(0.0, extrapolate(a.weight, b.weight));
        if (y < kSnap) {
            zero += mass;
        } else if (y > 1.0 - kSnap) {
            infinity += mass;
        } else {
            const double x = y / (1.0 - y);
            interior.push_back({x, mass});
        }
    }
    return triple_of(CompactifiedMeasure{zero, infinity, AtomicMeasure(std::move(interior))});
}

namespace {

std::vector<double> continuity_points(const std::vector<LevyTriple>& ts, const LevyTriple& limit) {
    std::vector<double> locs;
    for (const auto& t : ts) {
        for (const auto& a : t.jumps.atoms()) locs.push_back(a.location);
    }
    for (const auto& a : limit.jumps.atoms()) locs.push_back(a.location);
    std::sort(locs.begin(), locs.end());
    locs.erase(std::unique(locs.begin(), locs.end()), locs.end());
    if (locs.empty()) return {1.0};
    std::vector<double> pts{0.5 * locs.front()};
    for (std::size_t i = 1; i < locs.size(); ++i) pts.push_back(0.5 * (locs[i - 1] + locs[i]));
    pts.push_back(2.0 * locs.back());
    return pts;
}

}  // namespace

ContinuityReport continuity_report(const std::vector<LevyTriple>& ts, const std::vector<double>& q_grid,
                                   const std::optional<LevyTriple>& limit) {
    if (q_grid.empty()) throw std::invalid_argument("continuity_report: empty grid");
    if (ts.size() < 3) throw std::invalid_argument("continuity_report: need at least 3 triples");
    ContinuityReport rep;
    rep.limit_supplied = limit.has_value();
    rep.limit = limit ? *limit : estimate_limit(ts);
    const CompactifiedMeasure klim = kappa_of(rep.limit);
    const std::vector<double> pts = continuity_points(ts, rep.limit);

    std::vector<double> bern, kap, mech, lr;
    for (const auto& t : ts) {
        ContinuityRow row;
        for (double arg : q_grid) {
            row.bernstein_gap = std::max(
                row.bernstein_gap, std::abs(bernstein_value(t, arg) - bernstein_value(rep.limit, arg)) / (1.0 + arg));
            row.mechanism_gap = std::max(
                row.mechanism_gap, std::abs(mechanism(t, arg) - mechanism(rep.limit, arg)) / (1.0 + arg * arg));
        }
        row.kappa_gap = measure::kappa_distance(kappa_of(t), klim, q_grid);
        double acc = 0.0;
        for (double x : pts) {
            const auto [l1, r1] = left_right(t, x);
            const auto [l2, r2] = left_right(rep.limit, x);
            acc += std::min(1.0, std::abs(l1 - l2)) + std::min(1.0, std::abs(r1 - r2));
        }
        row.left_right_gap = acc / static_cast<double>(pts.size());
        bern.push_back(row.bernstein_gap);
        kap.push_back(row.kappa_gap);
        mech.push_back(row.mechanism_gap);
        lr.push_back(row.left_right_gap);
        rep.rows.push_back(row);
    }
    rep.bernstein_decreasing = is_decreasing(bern);
    rep.kappa_decreasing = is_decreasing(kap);
    rep.mechanism_decreasing = is_decreasing(mech);
    rep.left_right_decreasing = is_decreasing(lr);
    return rep;
}

}  // namespace branchlab::levy
