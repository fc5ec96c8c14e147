#include "beb/sim/strategies.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

#include "beb/errors.hpp"
#include "beb/sim/billing.hpp"
#include "beb/sim/truth.hpp"

namespace beb::sim {

std::string_view to_string(Strategy s) {
    switch (s) {
        case Strategy::qin: return "qin";
        case Strategy::open_loop: return "open-loop";
        case Strategy::hierarchical: return "hierarchical";
    }
    return "?";
}

Strategy parse_strategy(std::string_view s) {
    if (s == "qin") return Strategy::qin;
    if (s == "open-loop" || s == "open_loop") return Strategy::open_loop;
    if (s == "hierarchical") return Strategy::hierarchical;
    throw ValidationError("unknown strategy '" + std::string(s) + "'");
}

ExecutedTrajectory run_qin(const Scenario& sc, double threshold, Environment& env) {
    const int J = static_cast<int>(sc.buses.size());
    const int L = static_cast<int>(sc.charger_types.size());
    const double dt = env.trajectory().dt_min;
    enum class Phase { away, waiting, charging, done };
    std::vector<Phase> phase(J, Phase::away);
    std::vector<int> plugged(J, -1);
    std::vector<int> in_use(L, 0);
    std::deque<int> queue;

    // Charger types in preference order: fastest first, then type index.
    std::vector<int> pref(L);
    for (int l = 0; l < L; ++l) pref[l] = l;
    std::stable_sort(pref.begin(), pref.end(),
                     [&](int a, int b) { return sc.charger_types[a].p_cc_kw > sc.charger_types[b].p_cc_kw; });

    auto release = [&](int j) {
        if (plugged[j] >= 0) --in_use[plugged[j]];
        plugged[j] = -1;
    };

    while (env.clock() < sc.day_end_min - 1e-9) {
        const double t = env.clock();
        const auto& soc = env.soc();
        for (int j = 0; j < J; ++j) {
            bool here = false;
            for (int l = 0; l < L && !here; ++l) here = env.at_station(j, l, t);
            const double E = sc.buses[j].capacity_kwh;
            if (!here) {
                release(j);
                if (phase[j] == Phase::waiting) queue.erase(std::find(queue.begin(), queue.end(), j));
                phase[j] = Phase::away;
                continue;
            }
            if (phase[j] == Phase::away) {
                if (soc[j] < threshold * E) {
                    phase[j] = Phase::waiting;
                    queue.push_back(j);
                } else {
                    phase[j] = Phase::done;
                }
            } else if (phase[j] == Phase::charging && soc[j] >= sc.buses[j].max_soc * E - 1e-9) {
                release(j);
                phase[j] = Phase::done;
            }
        }
        for (auto it = queue.begin(); it != queue.end();) {
            const int j = *it;
            if (soc[j] >= threshold * sc.buses[j].capacity_kwh) {
                phase[j] = Phase::done;
                it = queue.erase(it);
                continue;
            }
            int pick = -1;
            for (int l : pref)
                if (env.at_station(j, l, t) && in_use[l] < sc.charger_types[l].count) {
                    pick = l;
                    break;
                }
            if (pick < 0) {
                ++it;
                continue;
            }
            plugged[j] = pick;
            ++in_use[pick];
            phase[j] = Phase::charging;
            it = queue.erase(it);
        }
        std::vector<BusCommand> cmd(J);
        for (int j = 0; j < J; ++j)
            if (phase[j] == Phase::charging) {
                cmd[j].charger = plugged[j];
                cmd[j].power_kw = INFINITY;
                cmd[j].stop_kwh = sc.buses[j].max_soc * sc.buses[j].capacity_kwh;
            }
        env.advance(cmd, dt);
    }
    return env.trajectory();
}

ExecutedTrajectory run_open_loop(const ChargePlan& ref, Environment& env) {
    const ExecutedTrajectory& tr = env.trajectory();
    const double dt = tr.dt_min;
    const double end = tr.time(tr.n_steps);
    const double ref_h = ref.delta_min / 60.0;
    while (env.clock() < end - 1e-9) {
        const double t = env.clock();
        const double mid = t + 0.5 * dt;
        std::vector<BusCommand> cmd(tr.n_buses);
        for (int j = 0; j < tr.n_buses && j < ref.n_buses; ++j) {
            const ChargeInterval* iv = ref.interval_at(j, mid);
            if (!iv) continue;
            const int k = static_cast<int>(std::floor((mid - ref.t0_min) / ref.delta_min));
            if (k < 0 || k >= ref.n_steps) continue;
            cmd[j].charger = iv->charger;
            cmd[j].power_kw = ref.gain(j, k, iv->charger) / ref_h;
        }
        env.advance(cmd, dt);
    }
    return env.trajectory();
}

CostBreakdown bill_trajectory(const ExecutedTrajectory& tr, const RateSchedule& rates, double billing_delta_min) {
    const int factor = std::max(1, static_cast<int>(std::lround(billing_delta_min / tr.dt_min)));
    EnergySeries s;
    s.t0_min = tr.t0_min;
    s.delta_min = tr.dt_min * factor;
    s.bus = rebin(tr.bus_energy, factor);
    s.load = rebin(tr.load_energy, factor);
    return billing_oracle(s, rates).cost;
}

SimRun simulate(const Scenario& sc, const ChargePlan& reference, Strategy strategy, const SimConfig& cfg,
                std::uint64_t seed) {
    TruthEnvironment env(sc, cfg.noise, seed, cfg.sim_dt_min, cfg.initial_kwh);
    SimRun run;
    run.seed = seed;
    run.strategy = strategy;
    switch (strategy) {
        case Strategy::qin: run.traj = run_qin(sc, cfg.qin_threshold, env); break;
        case Strategy::open_loop: run.traj = run_open_loop(reference, env); break;
        case Strategy::hierarchical: run.traj = run_day(sc, reference, cfg.horizon, env); break;
    }
    run.cost = bill_trajectory(run.traj, sc.rates, cfg.billing_delta_min);
    run.traj.cost = run.cost;
    return run;
}

}  // namespace beb::sim
