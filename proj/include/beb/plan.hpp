#pragma once

#include <string>
#include <vector>

namespace beb {

struct CostBreakdown {
    double consumption = 0.0;  // $ on bus energy
    double baseline = 0.0;     // c_b * p_max
    double tou = 0.0;          // c_TOU * p_max_TOU
    double other = 0.0;        // edge costs, terminal and soft-SOC penalties

    double utility() const { return consumption + baseline + tou; }
    double total() const { return utility() + other; }
};

/// One uninterrupted connection of a bus to a charger type.
struct ChargeInterval {
    int bus = -1;
    int charger = -1;
    int visit_id = -1;
    int k_begin = 0;  // plan grid steps [k_begin, k_end)
    int k_end = 0;
    double start_min = 0.0;
    double end_min = 0.0;
    double kwh = 0.0;
};

/// A solved plan on a uniform grid t_k = t0 + k*delta.
struct ChargePlan {
    double t0_min = 0.0;
    double delta_min = 0.0;
    int n_steps = 0;
    int n_buses = 0;
    int n_chargers = 0;

    std::vector<ChargeInterval> intervals;
    std::vector<double> gains;        // [(j*K + k)*L + l]
    std::vector<double> soc;          // [j*(K+1) + k]
    std::vector<double> bus_energy;   // [k], sum of gains
    std::vector<double> load_energy;  // [k]
    std::vector<double> p_avg;        // [k], k = 0..K; p_avg[0] unused
    double p_max = 0.0;
    double p_max_tou = 0.0;
    double objective = 0.0;
    CostBreakdown cost;

    double t1_min() const { return t0_min + n_steps * delta_min; }
    double time(int k) const { return t0_min + k * delta_min; }
    bool empty() const { return n_steps == 0; }
    double gain(int j, int k, int l) const {
        return gains[(static_cast<std::size_t>(j) * n_steps + k) * n_chargers + l];
    }
    double soc_at_step(int j, int k) const { return soc[static_cast<std::size_t>(j) * (n_steps + 1) + k]; }
    /// Linear interpolation of bus j's planned SOC at wall-clock t (clamped to the plan span).
    double soc_at(int j, double t_min) const;
    /// Chargers of type l busy over [a, b) according to the intervals (max over overlapped steps).
    int busy_chargers(int l, double a_min, double b_min) const;
    /// Interval of bus j covering wall-clock t, or nullptr.
    const ChargeInterval* interval_at(int j, double t_min) const;
};

/// CSV `bus,charger_type,start_min,end_min,kwh_gained` using the given id tables.
std::string plan_csv(const ChargePlan& plan, const std::vector<std::string>& bus_ids,
                     const std::vector<std::string>& charger_ids);

}  // namespace beb
