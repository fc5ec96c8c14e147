#pragma once

#include <cmath>
#include <cstdint>
#include <set>
#include <utility>
#include <vector>

#include "beb/plan.hpp"
#include "beb/scenario.hpp"
#include "beb/solver.hpp"
#include "beb/trajectory.hpp"

namespace beb {

struct HorizonConfig {
    double horizon_min = 60.0;
    double delta_rh_min = 3.0;
    /// $ per kWh of terminal error; negative picks the larger of the scenario's two consumption rates.
    double terminal_weight = -1.0;
    /// $ per edge close to the previous plan; negative picks 1e-3 x the smallest positive objective coefficient.
    double preference_bonus = -1.0;
    double soc_buffer = 0.05;
    /// Start each horizon's demand maxima at the reference plan's peaks, not only the realized ones.
    bool reference_demand_floor = true;
    double soft_penalty_factor = 100.0;
    solver::SolveLimits limits{10.0, 1e-4, 2000};
};

/// Defaults resolved against a scenario (negative weights replaced).
HorizonConfig resolve(const HorizonConfig& cfg, const Scenario& scenario);

/// Controller state carried from one horizon to the next.
struct ExecutionState {
    double clock = 0.0;
    std::vector<double> soc;                   // kWh per bus, from feedback
    std::set<int> charged_visits;              // visit ids that already had a charge
    std::set<std::pair<int, int>> connected;   // (visit id, charger type) plugged in at `clock`
    std::vector<double> energy_history;        // realized total kWh per horizon step, oldest first
    std::vector<std::uint8_t> absent;          // buses scheduled at a station but not there yet
    double realized_p_max = 0.0;
    double realized_p_max_tou = 0.0;
    ChargePlan previous_plan;
};

struct HorizonPlan {
    ChargePlan plan;
    solver::MilpStatus status = solver::MilpStatus::infeasible;
    bool used_soft_min = false;
    bool feasible = false;  // false: nothing usable, the step rests
    long nodes = 0;
};

/// Environment driven by a controller: it owns the true state.
struct BusCommand {
    int charger = -1;       // type to use, -1 to rest
    double power_kw = 0.0;  // requested average power while plugged in
    double stop_kwh = INFINITY;  // stop once the bus reaches this level
};

struct StepOutcome {
    std::vector<double> gain;  // realized kWh per bus
    std::vector<int> charger;  // type that delivered energy during the step, or -1
    double bus_energy = 0.0;
    double load_energy = 0.0;
};

class Environment {
public:
    virtual ~Environment() = default;
    virtual double clock() const = 0;
    virtual const std::vector<double>& soc() const = 0;
    /// Bus j is at a station offering charger type l at wall-clock t.
    virtual bool at_station(int j, int l, double t_min) const = 0;
    /// Applies constant commands over [clock, clock + duration).
    virtual StepOutcome advance(const std::vector<BusCommand>& commands, double duration_min) = 0;
    virtual const ExecutedTrajectory& trajectory() const = 0;
};

ExecutionState initial_state(const Scenario& scenario, double clock, const std::vector<double>& soc_kwh);

HorizonPlan plan_horizon(const ExecutionState& state, const Scenario& scenario, const ChargePlan& reference,
                         const HorizonConfig& cfg);

/// Executes the first step of `plan` and returns the advanced state.
ExecutionState step(const ExecutionState& state, const HorizonPlan& plan, const Scenario& scenario,
                    const HorizonConfig& cfg, Environment& env);

/// Closed loop from the environment's clock to day end. Billing is left to the caller.
ExecutedTrajectory run_day(const Scenario& scenario, const ChargePlan& reference, const HorizonConfig& cfg,
                           Environment& env);

}  // namespace beb
