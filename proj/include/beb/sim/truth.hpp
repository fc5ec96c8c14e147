#pragma once

#include <cstdint>
#include <vector>

#include "beb/charge_model.hpp"
#include "beb/receding_horizon.hpp"
#include "beb/scenario.hpp"
#include "beb/sim/noise.hpp"
#include "beb/trajectory.hpp"

namespace beb::sim {

/// s - d + bias*dt + sigma*sqrt(dt)*z, clamped to [0, capacity]. dt in seconds, bias in kW.
double truth_discharge_step(double soc, double discharge_kwh, double bias_kw, double sigma_nu, double z, double dt_s,
                            double capacity);

/// Adds a commanded gain (already capped by what CC-CV can deliver) plus the
/// active charger's bias and white noise; no charger, no noise terms.
double truth_charge_step(double soc, double gain_kwh, bool active, double bias_kw, double sigma_nu, double z,
                         double dt_s, double capacity);

/// Stochastic plant on a fine uniform grid. Arrivals are perturbed once per
/// run; the controller sees only SOC feedback and station presence.
class TruthEnvironment final : public Environment {
public:
    TruthEnvironment(const Scenario& nominal, const NoiseParams& params, std::uint64_t seed, double dt_min = 1.0,
                     std::vector<double> initial_kwh = {});

    double clock() const override { return tr_.time(step_); }
    const std::vector<double>& soc() const override { return soc_; }
    bool at_station(int j, int l, double t_min) const override;
    StepOutcome advance(const std::vector<BusCommand>& commands, double duration_min) override;
    const ExecutedTrajectory& trajectory() const override { return tr_; }

    const Scenario& actual() const { return actual_; }
    const RunNoise& noise() const { return noise_; }
    bool done() const { return step_ >= tr_.n_steps; }
    double dt_min() const { return tr_.dt_min; }

private:
    // Minutes of [a, b) bus j spends at a station offering type l.
    double station_overlap(int j, int l, double a, double b) const;

    Scenario nominal_;
    Scenario actual_;
    NoiseParams params_;
    RunNoise noise_;
    std::vector<ContinuousChargeParams> charge_;  // [j*L + l]
    std::vector<double> soc_;
    ExecutedTrajectory tr_;
    int step_ = 0;
};

}  // namespace beb::sim
