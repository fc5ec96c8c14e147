#pragma once

#include <string>
#include <vector>

#include "beb/plan.hpp"

namespace beb {

/// What actually happened during one simulated day, on the simulator grid
/// t_i = t0 + i*dt. Index [i*J + j].
struct ExecutedTrajectory {
    double t0_min = 0.0;
    double dt_min = 1.0;
    int n_steps = 0;
    int n_buses = 0;

    std::vector<double> soc;          // (n_steps + 1) * J, kWh
    std::vector<double> gain;         // n_steps * J, realized kWh over step i
    std::vector<int> charger;         // n_steps * J, type charging during step i or -1
    std::vector<double> bus_energy;   // [i], grid energy into buses
    std::vector<double> load_energy;  // [i], uncontrolled load

    int violation_steps = 0;      // bus-steps ending below the unbuffered minimum
    double worst_violation = 0.0;  // kWh below the minimum
    int fallbacks = 0;            // horizons that needed the soft-SOC re-solve
    int solver_limits = 0;        // horizons ended by a solver limit
    bool failed = false;
    std::string diagnostics;
    CostBreakdown cost;           // filled by the billing oracle

    double time(int i) const { return t0_min + i * dt_min; }
    double soc_at(int i, int j) const { return soc[static_cast<std::size_t>(i) * n_buses + j]; }
    bool violated() const { return violation_steps > 0; }
};

/// CSV `t_min,bus,soc_kwh,charging_type,gain_kwh`, one row per bus per step
/// (state at the step start, gain over the step), then the end-of-day state.
std::string trajectory_csv(const ExecutedTrajectory& tr, const std::vector<std::string>& bus_ids,
                           const std::vector<std::string>& charger_ids);

}  // namespace beb
