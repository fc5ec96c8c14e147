#pragma once

#include <cstdint>
#include <vector>

#include "beb/scenario.hpp"

namespace beb {

/// One bus's contiguous availability window at a station. `id` enumerates
/// every in_station block of the scenario (bus order, then block order) so it
/// is stable across horizons.
struct Visit {
    int id = -1;
    int bus = -1;
    int block = -1;
    std::vector<int> chargers;  // charger type indices usable during the visit
    int k_begin = 0;            // first step fully inside the block
    int k_end = 0;              // one past the last such step
};

/// Per-bus constants the model needs, already in kWh.
struct BusParams {
    double capacity_kwh = 0.0;
    double eta = 1.0;
    double min_kwh = 0.0;
    double max_kwh = 0.0;
    double initial_kwh = 0.0;
    double final_kwh = 0.0;
};

/// A scenario sampled on a uniform grid t_k = t0 + k*delta, k = 0..n_steps.
/// Step k is the interval [t_k, t_{k+1}).
struct DiscreteInstance {
    double t0_min = 0.0;
    double delta_min = 5.0;
    int n_steps = 0;
    int n_buses = 0;
    int n_chargers = 0;

    std::vector<BusParams> buses;
    std::vector<int> charger_count;
    std::vector<double> p_cc_kw;
    std::vector<double> alpha;        // [j * n_chargers + l], 1/h
    std::vector<std::uint8_t> gamma;  // [(j * n_steps + k) * n_chargers + l]
    std::vector<double> discharge;    // [j * n_steps + k], kWh
    std::vector<double> load;         // [k], kWh
    std::vector<double> rate;         // [k], $/kWh at step start
    std::vector<std::uint8_t> tou;    // [k], k = 0..n_steps; window ending at t_k is on-peak
    std::vector<Visit> visits;
    std::vector<int> visit_at;        // [j * n_steps + k] -> index into visits, or -1

    double delta_h() const { return delta_min / 60.0; }
    double time(int k) const { return t0_min + k * delta_min; }
    double t1_min() const { return time(n_steps); }

    bool available(int j, int k, int l) const {
        return gamma[(static_cast<std::size_t>(j) * n_steps + k) * n_chargers + l] != 0;
    }
    bool any_available(int j, int k) const;
    double discharge_at(int j, int k) const {
        return discharge[static_cast<std::size_t>(j) * n_steps + k];
    }
    double alpha_of(int j, int l) const { return alpha[static_cast<std::size_t>(j) * n_chargers + l]; }

    /// L(j,k): charger types bus j may use over step k.
    std::vector<int> chargers_at(int j, int k) const;
    /// K(j,l): steps where bus j may use charger type l.
    std::vector<int> steps_for(int j, int l) const;
    /// Index into `visits` whose id equals `visit_id`, or -1.
    int visit_index(int visit_id) const;
};

/// Samples `scenario` over [t0, t1) with step `delta_min`. A trailing partial
/// step is dropped and availability needs the whole step inside a station
/// block. Throws ValidationError for an empty horizon.
DiscreteInstance discretize(const Scenario& scenario, double delta_min, double t0_min,
                            double t1_min);

/// Whole operating day at `delta_min`.
DiscreteInstance discretize(const Scenario& scenario, double delta_min);

/// Global visit ids for every in_station block: result[j][block] or -1.
std::vector<std::vector<int>> visit_ids(const Scenario& scenario);

}  // namespace beb
