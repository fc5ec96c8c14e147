#pragma once

namespace beb {

// CC-CV charging profile. Hours, kWh and kW throughout.

struct ContinuousChargeParams {
    double p_cc = 0.0;   // kW
    double alpha = 0.0;  // 1/h
    double capacity = 0.0;
    double eta_E = 0.0;  // kWh where CC switches to CV
    double t_cc = 0.0;   // h from empty to eta_E
    double a_cc = 0.0;
    double b_cc = 0.0;
    double a_cv = 0.0;
    double b_cv = 0.0;
};

struct DiscreteChargeParams {
    double delta = 0.0;  // h
    double a_bar_cc = 1.0;
    double b_bar_cc = 0.0;
    double a_bar_cv = 0.0;
    double b_bar_cv = 0.0;
};

ContinuousChargeParams continuous_params(double p_cc_kw, double alpha_per_h, double eta,
                                         double capacity_kwh);
DiscreteChargeParams discretize_params(const ContinuousChargeParams& c, double delta_h);

/// min(b_bar_cc, (a_bar_cv - 1) s + b_bar_cv), floored at 0.
double gain_upper_bound(double s, const DiscreteChargeParams& d);

/// Two-case bound: b_bar_cc below eta_E, the CV line at or above it.
double ideal_gain_bound(double s, const DiscreteChargeParams& d, const ContinuousChargeParams& c);

/// Where the CC and CV lines of the concave bound intersect.
double switching_point(const DiscreteChargeParams& d, const ContinuousChargeParams& c);

/// Largest gap between the ideal and the concave bound.
double max_gain_error(const DiscreteChargeParams& d, const ContinuousChargeParams& c);

/// Largest delta (hours) with max_gain_error <= eps_d, by bisection on a log grid
/// over [1e-9, 10] h to 1e-6 h. Throws std::domain_error below the grid floor.
double step_size_for_error(const ContinuousChargeParams& c, double eps_d);

/// Charge level after `duration_h` at full rate from `s0`, crossing from CC to
/// CV mid-interval if needed. Not clamped (see simulate_exact_clamped).
double simulate_exact(double s0, double duration_h, const ContinuousChargeParams& c);

/// simulate_exact capped at the battery capacity.
double simulate_exact_clamped(double s0, double duration_h, const ContinuousChargeParams& c);

/// One step of the discrete system in the phase of s0.
double discrete_step(double s0, const DiscreteChargeParams& d, const ContinuousChargeParams& c);

}  // namespace beb
