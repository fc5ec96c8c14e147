#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "beb/plan.hpp"
#include "beb/receding_horizon.hpp"
#include "beb/scenario.hpp"
#include "beb/sim/noise.hpp"
#include "beb/trajectory.hpp"

namespace beb::sim {

enum class Strategy { qin, open_loop, hierarchical };
std::string_view to_string(Strategy s);
/// "qin", "open-loop" or "hierarchical"; throws ValidationError otherwise.
Strategy parse_strategy(std::string_view s);

struct SimConfig {
    NoiseParams noise;
    double sim_dt_min = 1.0;
    double qin_threshold = 0.7;  // SOC fraction
    HorizonConfig horizon;
    /// Grid the realized energy is billed on (the day plan's step).
    double billing_delta_min = 5.0;
    std::vector<double> initial_kwh;  // empty: scenario initial SOC
};

struct SimRun {
    std::uint64_t seed = 0;
    Strategy strategy = Strategy::qin;
    ExecutedTrajectory traj;
    CostBreakdown cost;  // from the billing oracle only
};

/// Thresholding: on arrival below the threshold, wait (FIFO) for the fastest
/// free charger and charge at full rate until max SOC or departure.
ExecutedTrajectory run_qin(const Scenario& scenario, double threshold, Environment& env);

/// Follows the reference intervals at their planned rates; late arrivals cut
/// the front of an interval, nothing is ever added.
ExecutedTrajectory run_open_loop(const ChargePlan& reference, Environment& env);

/// One seeded day with the chosen strategy, billed by the oracle.
SimRun simulate(const Scenario& scenario, const ChargePlan& reference, Strategy strategy, const SimConfig& cfg,
                std::uint64_t seed);

/// Oracle bill of a trajectory on the `billing_delta_min` grid.
CostBreakdown bill_trajectory(const ExecutedTrajectory& tr, const RateSchedule& rates, double billing_delta_min);

}  // namespace beb::sim
