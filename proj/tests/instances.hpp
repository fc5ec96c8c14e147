#pragma once

// Seeded generator of tiny scheduling instances for exhaustive checks.

#include <algorithm>

#include "beb/rng.hpp"
#include "model_util.hpp"
#include "support.hpp"

namespace beb::test {

struct TinyOptions {
    int max_binary = 12;
    double delta = 5.0;
    int max_steps = 6;
    bool fixed_rate = false;
    bool terminal = true;
    double terminal_weight = -1.0;  // negative draws one in [0.05, 0.5]
};

inline int count_binaries(const ActionGraph& g) {
    return static_cast<int>(std::count_if(g.edges.begin(), g.edges.end(), [](const Edge& e) { return e.capacity == 1; }));
}

/// 1-2 buses, 1-2 charger types, at most `max_steps` steps and `max_binary`
/// unit-capacity edges. A terminal cost toward the starting SOC makes the
/// charge decisions matter.
inline Scenario tiny_scenario(Rng& r, const TinyOptions& o) {
    for (;;) {
        const int K = static_cast<int>(r.uniform_int(3, o.max_steps));
        const int J = static_cast<int>(r.uniform_int(1, 2));
        const int L = static_cast<int>(r.uniform_int(1, 2));
        const double end = K * o.delta;
        std::vector<ChargerType> cs;
        std::vector<std::string> ids;
        for (int l = 0; l < L; ++l) {
            ids.push_back("c" + std::to_string(l));
            cs.push_back(charger(ids.back(), 1, r.uniform(40, 300), r.uniform(1, 5)));
        }
        std::vector<Bus> buses;
        bool any_station = false;
        for (int j = 0; j < J; ++j) {
            std::vector<ScheduleBlock> blocks;
            int k = 0;
            while (k < K) {
                const int len = static_cast<int>(r.uniform_int(1, 2));
                const int k2 = std::min(K, k + len);
                const bool after_station = !blocks.empty() && blocks.back().kind == BlockKind::in_station;
                if (after_station || r.uniform() < 0.5) {
                    blocks.push_back(route(k * o.delta, k2 * o.delta, r.uniform(20, 120)));
                } else {
                    std::vector<std::string> at;
                    for (const auto& id : ids)
                        if (at.empty() || r.uniform() < 0.5) at.push_back(id);
                    blocks.push_back(station(k * o.delta, k2 * o.delta, at));
                    any_station = true;
                }
                k = k2;
            }
            const double cap = r.uniform(60, 200);
            buses.push_back(bus("b" + std::to_string(j), cap, r.uniform(0.6, 0.95), blocks, r.uniform(0.4, 0.8), 0.7,
                                0.05, 1.0));
        }
        if (!any_station) continue;
        const double peak_a = o.delta * static_cast<double>(r.uniform_int(0, K - 1));
        RateSchedule rs = rates(r.uniform(0.02, 0.1), r.uniform(0.1, 0.3), r.uniform(0, 5), r.uniform(0, 10),
                                {{peak_a, peak_a + o.delta * 2}}, 15.0);
        try {
            Scenario sc = scenario(std::move(buses), std::move(cs), std::move(rs), 0, end);
            if (r.uniform() < 0.3) sc.load_profile = {{0, r.uniform(0, 5)}, {end / 2, r.uniform(0, 5)}};
            const int n = count_binaries(*build(sc, o.delta).graph);
            if (n == 0 || n > o.max_binary) continue;
            return sc;
        } catch (const std::exception&) {
            continue;
        }
    }
}

inline Built tiny_model(const Scenario& sc, const TinyOptions& o, Rng& r) {
    ModelOptions mo;
    mo.fixed_rate = o.fixed_rate;
    mo.final_soc_equality = false;
    mo.soc_buffer = 0.0;
    Built b = build(sc, o.delta, mo);
    if (o.terminal) {
        std::vector<double> target;
        for (const auto& bp : b.inst->buses) target.push_back(bp.initial_kwh);
        add_terminal_cost(b.model, target, o.terminal_weight < 0 ? r.uniform(0.05, 0.5) : o.terminal_weight);
    }
    return b;
}

}  // namespace beb::test
