#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>

#include "branchlab/scaling_limits.hpp"

namespace branchlab::scaling {

namespace {

std::optional<double> rk4_step(const std::function<double(double)>& rate, double y, double step) {
    auto slope = [&rate](double v) -> std::optional<double> {
        if (v < 0.0 || !std::isfinite(v)) return std::nullopt;
        return -rate(v);
    };
    const auto k1 = slope(y);
    if (!k1) return std::nullopt;
    const auto k2 = slope(y + 0.5 * step * *k1);
    if (!k2) return std::nullopt;
    const auto k3 = slope(y + 0.5 * step * *k2);
    if (!k3) return std::nullopt;
    const auto k4 = slope(y + step * *k3);
    if (!k4) return std::nullopt;
    const double out = y + step / 6.0 * (*k1 + 2.0 * *k2 + 2.0 * *k3 + *k4);
    if (out < 0.0 || !std::isfinite(out)) return std::nullopt;
    return out;
}

}  // namespace

std::vector<double> integrate_exponent(const std::function<double(double)>& rate, double start,
                                       const std::vector<double>& times, double rel_tol) {
    std::vector<double> out;
    out.reserve(times.size());
    double y = start;
    double now = 0.0;
    const double r0 = rate(start);
    double step = r0 > 0.0 ? 0.01 * std::max(start, 1e-300) / r0 : 1.0;
    for (double target : times) {
        if (!(target >= now)) throw std::invalid_argument("integrate_exponent: times must be sorted and >= 0");
        while (now < target) {
            const double remaining = target - now;
            const bool clipped = step >= remaining;
            const double span = clipped ? remaining : step;
            const auto coarse = rk4_step(rate, y, span);
            std::optional<double> fine;
            if (coarse) {
                const auto half = rk4_step(rate, y, 0.5 * span);
                if (half) fine = rk4_step(rate, *half, 0.5 * span);
            }
            double factor = 0.25;
            bool accept = false;
            if (coarse && fine) {
                const double err = std::abs(*fine - *coarse) / 15.0;
                const double allowed = rel_tol * std::max(std::abs(*fine), 1e-300);
                accept = err <= allowed;
                factor = err == 0.0 ? 4.0 : std::clamp(0.9 * std::pow(allowed / err, 0.2), 0.1, 4.0);
                if (accept) {
                    y = std::max(0.0, *fine + (*fine - *coarse) / 15.0);
                    now = clipped ? target : now + span;
                }
            }
            const double proposal = span * factor;
            step = accept && clipped ? std::max(step, proposal) : proposal;
            if (!accept && step < 1e-15 * std::max(1.0, target)) {
                throw std::runtime_error("integrate_exponent: step size underflow");
            }
        }
        out.push_back(y);
    }
    return out;
}

double exponent_value(const LevyTriple& t, double arg, double time) {
    if (!(arg >= 0.0)) throw std::invalid_argument("exponent_value: argument must be nonnegative");
    if (!(time >= 0.0)) throw std::invalid_argument("exponent_value: time must be nonnegative");
    if (time == 0.0 || arg == 0.0) return arg;
    return integrate_exponent([&t](double v) { return levy::mechanism(t, v); }, arg, {time})[0];
}

}  // namespace branchlab::scaling
