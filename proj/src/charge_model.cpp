#include "beb/charge_model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace beb {

ContinuousChargeParams continuous_params(double p_cc, double alpha, double eta, double capacity) {
    if (!(p_cc > 0) || !(alpha > 0) || !(eta > 0 && eta <= 1) || !(capacity > 0))
        throw std::invalid_argument("charge model needs p_cc > 0, alpha > 0, 0 < eta <= 1, E > 0");
    ContinuousChargeParams c;
    c.p_cc = p_cc;
    c.alpha = alpha;
    c.capacity = capacity;
    c.eta_E = eta * capacity;
    c.t_cc = c.eta_E / p_cc;
    c.a_cc = 0.0;
    c.b_cc = p_cc;
    c.a_cv = -alpha;
    c.b_cv = alpha * p_cc * c.t_cc + p_cc;
    return c;
}

DiscreteChargeParams discretize_params(const ContinuousChargeParams& c, double delta) {
    if (!(delta > 0)) throw std::invalid_argument("delta must be > 0");
    DiscreteChargeParams d;
    d.delta = delta;
    d.a_bar_cc = 1.0;
    d.b_bar_cc = c.b_cc * delta;
    d.a_bar_cv = std::exp(c.a_cv * delta);
    // (a_bar - 1) b / a with expm1 to keep precision for small a*delta.
    d.b_bar_cv = std::expm1(c.a_cv * delta) * c.b_cv / c.a_cv;
    return d;
}

double gain_upper_bound(double s, const DiscreteChargeParams& d) {
    const double cv = (d.a_bar_cv - 1.0) * s + d.b_bar_cv;
    return std::max(0.0, std::min(d.b_bar_cc, cv));
}

double ideal_gain_bound(double s, const DiscreteChargeParams& d, const ContinuousChargeParams& c) {
    if (s < c.eta_E) return d.b_bar_cc;
    return std::max(0.0, (d.a_bar_cv - 1.0) * s + d.b_bar_cv);
}

double switching_point(const DiscreteChargeParams& d, const ContinuousChargeParams& c) {
    const double z = c.alpha * d.delta;
    return c.p_cc * d.delta / std::expm1(-z) + c.p_cc * c.t_cc + c.p_cc / c.alpha;
}

double max_gain_error(const DiscreteChargeParams& d, const ContinuousChargeParams& c) {
    const double z = c.alpha * d.delta;
    // 1 - (1 - e^{-z})/z, evaluated without cancellation for small z.
    const double f = z < 1e-4 ? z / 2.0 - z * z / 6.0 + z * z * z / 24.0 : 1.0 + std::expm1(-z) / z;
    return f * d.b_bar_cc;
}

double step_size_for_error(const ContinuousChargeParams& c, double eps_d) {
    if (!(eps_d > 0)) throw std::invalid_argument("eps_d must be > 0");
    constexpr double lo_floor = 1e-9, hi_ceil = 10.0, tol = 1e-6;
    auto err = [&](double delta) { return max_gain_error(discretize_params(c, delta), c); };
    if (err(hi_ceil) <= eps_d) return hi_ceil;
    if (err(lo_floor) > eps_d) throw std::domain_error("eps_d too small for the step-size grid");
    // Bisect in log space; the error is increasing in delta.
    double lo = std::log(lo_floor), hi = std::log(hi_ceil);
    while (std::exp(hi) - std::exp(lo) > tol) {
        const double mid = 0.5 * (lo + hi);
        if (err(std::exp(mid)) <= eps_d)
            lo = mid;
        else
            hi = mid;
    }
    return std::exp(lo);
}

double simulate_exact(double s0, double duration, const ContinuousChargeParams& c) {
    if (duration < 0) throw std::invalid_argument("negative duration");
    double s = s0;
    double t = duration;
    if (s < c.eta_E) {
        const double to_switch = (c.eta_E - s) / c.p_cc;
        if (t <= to_switch) return s + c.p_cc * t;
        s = c.eta_E;
        t -= to_switch;
    }
    // CV: ds/dt = a_cv s + b_cv, decaying toward b_cv / alpha.
    const double s_inf = c.b_cv / c.alpha;
    return s_inf + (s - s_inf) * std::exp(c.a_cv * t);
}

double simulate_exact_clamped(double s0, double duration, const ContinuousChargeParams& c) {
    return std::min(c.capacity, simulate_exact(s0, duration, c));
}

double discrete_step(double s0, const DiscreteChargeParams& d, const ContinuousChargeParams& c) {
    if (s0 < c.eta_E) return d.a_bar_cc * s0 + d.b_bar_cc;
    return d.a_bar_cv * s0 + d.b_bar_cv;
}

}  // namespace beb
