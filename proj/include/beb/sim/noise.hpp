#pragma once

#include <cstdint>
#include <vector>

#include "beb/scenario.hpp"

namespace beb::sim {

/// Standard deviations of the truth-model noise. Biases are kW (integrated
/// over the step), white noise is kWh/sqrt(s) (scaled by sqrt of the step).
struct NoiseParams {
    double sigma_nu_d = 0.0;    // discharge white noise
    double sigma_beta_d = 0.0;  // discharge bias, per bus
    double sigma_nu_c_slow = 0.0, sigma_nu_c_fast = 0.0;
    double sigma_beta_c_slow = 0.0, sigma_beta_c_fast = 0.0;
    double sigma_a_s = 0.0;  // arrival time, seconds

    double sigma_nu_c(ChargerClass c) const { return c == ChargerClass::fast ? sigma_nu_c_fast : sigma_nu_c_slow; }
    double sigma_beta_c(ChargerClass c) const { return c == ChargerClass::fast ? sigma_beta_c_fast : sigma_beta_c_slow; }

    /// Default magnitudes from field measurements.
    static NoiseParams paper();
    static NoiseParams zero() { return {}; }
};

/// Every random quantity of one run, drawn up front.
struct RunNoise {
    int n_steps = 0;
    int n_buses = 0;
    int n_chargers = 0;
    std::vector<double> bias_d;     // kW per bus
    std::vector<double> bias_c;     // kW per charger type
    std::vector<double> arrival_s;  // seconds per visit id
    std::vector<double> z_d;        // standard normals [step * J + j]
    std::vector<double> z_c;        // standard normals [step * L + l]

    double zd(int step, int j) const { return z_d[static_cast<std::size_t>(step) * n_buses + j]; }
    double zc(int step, int l) const { return z_c[static_cast<std::size_t>(step) * n_chargers + l]; }
};

/// Independent streams per bus, per charger type and for arrivals, all
/// derived from `seed`, so a run is a pure function of (params, scenario, seed).
RunNoise sample_run_noise(const NoiseParams& params, const Scenario& scenario, std::uint64_t seed, int n_steps);

/// Shifts each station arrival by its perturbation, clamped to
/// [previous departure, visit end]. Departures stay put and the preceding
/// route keeps its energy (its power is rescaled to the new duration).
Scenario perturb_arrivals(const Scenario& scenario, const std::vector<double>& arrival_s);

}  // namespace beb::sim
