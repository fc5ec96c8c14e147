#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "beb/day_plan.hpp"
#include "beb/sim/strategies.hpp"

namespace beb::sim {

struct MCOptions {
    int n_runs = 30;
    std::uint64_t base_seed = 1;
    int jobs = 1;
    SimConfig sim;
};

struct MCReport {
    Strategy strategy = Strategy::qin;
    std::vector<SimRun> runs;  // sorted by seed
    double mean_cost = 0.0;    // utility bill
    double violation_rate = 0.0;  // violating bus-steps / all bus-steps
    int runs_with_violation = 0;
    int failed_runs = 0;
    // Trace on the simulator grid.
    double t0_min = 0.0;
    double dt_min = 1.0;
    std::vector<double> mean_soc;  // [i], mean over runs and buses, kWh
    std::vector<double> sigma3;    // [i], 3 x std of per-bus deviations from the cross-run mean
    std::vector<double> mean_final_kwh;  // per bus

    double terminal_sigma3() const { return sigma3.empty() ? 0.0 : sigma3.back(); }
};

/// Run i uses seed derive_seed(base_seed, i), so strategies compared with
/// the same base seed see the same noise.
std::uint64_t run_seed(std::uint64_t base_seed, int i);

MCReport monte_carlo(const Scenario& scenario, const ChargePlan& reference, Strategy strategy, const MCOptions& opt);

/// Reduces finished runs; the result does not depend on their order.
MCReport reduce_runs(Strategy strategy, std::vector<SimRun> runs);

struct DayReport {
    int day = 0;
    std::vector<double> initial_kwh;
    bool plan_feasible = false;
    std::string plan_status;
    double nominal_cost = 0.0;
    MCReport mc;  // empty when the nominal plan failed
};

/// Chains days: each day re-plans from the previous day's mean final SOC and
/// stops after the first day whose nominal plan is infeasible.
std::vector<DayReport> multi_day(const Scenario& scenario, Strategy strategy, int n_days, const MCOptions& opt,
                                 const DayPlanOptions& plan_opt);

}  // namespace beb::sim
