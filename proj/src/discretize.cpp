#include "beb/discretize.hpp"

#include <algorithm>
#include <cmath>

#include "beb/errors.hpp"

namespace beb {

bool DiscreteInstance::any_available(int j, int k) const {
    for (int l = 0; l < n_chargers; ++l)
        if (available(j, k, l)) return true;
    return false;
}

std::vector<int> DiscreteInstance::chargers_at(int j, int k) const {
    std::vector<int> out;
    for (int l = 0; l < n_chargers; ++l)
        if (available(j, k, l)) out.push_back(l);
    return out;
}

std::vector<int> DiscreteInstance::steps_for(int j, int l) const {
    std::vector<int> out;
    for (int k = 0; k < n_steps; ++k)
        if (available(j, k, l)) out.push_back(k);
    return out;
}

int DiscreteInstance::visit_index(int visit_id) const {
    for (std::size_t i = 0; i < visits.size(); ++i)
        if (visits[i].id == visit_id) return static_cast<int>(i);
    return -1;
}

std::vector<std::vector<int>> visit_ids(const Scenario& sc) {
    std::vector<std::vector<int>> ids(sc.buses.size());
    int next = 0;
    for (std::size_t j = 0; j < sc.buses.size(); ++j) {
        ids[j].assign(sc.buses[j].schedule.size(), -1);
        for (std::size_t b = 0; b < sc.buses[j].schedule.size(); ++b)
            if (sc.buses[j].schedule[b].kind == BlockKind::in_station) ids[j][b] = next++;
    }
    return ids;
}

DiscreteInstance discretize(const Scenario& sc, double delta_min, double t0, double t1) {
    if (!(delta_min > 0)) throw ValidationError("discretization step must be > 0");
    // Tolerate float noise so that e.g. 60 / 3 gives exactly 20 steps.
    const int K = static_cast<int>(std::floor((t1 - t0) / delta_min + 1e-9));
    if (K < 1) throw ValidationError("empty horizon");

    DiscreteInstance d;
    d.t0_min = t0;
    d.delta_min = delta_min;
    d.n_steps = K;
    d.n_buses = static_cast<int>(sc.buses.size());
    d.n_chargers = static_cast<int>(sc.charger_types.size());
    const int J = d.n_buses, L = d.n_chargers;

    for (const auto& c : sc.charger_types) {
        d.charger_count.push_back(c.count);
        d.p_cc_kw.push_back(c.p_cc_kw);
    }
    d.alpha.resize(static_cast<std::size_t>(J) * L);
    for (int j = 0; j < J; ++j)
        for (int l = 0; l < L; ++l) d.alpha[static_cast<std::size_t>(j) * L + l] = sc.alpha(j, l);

    for (const auto& b : sc.buses) {
        BusParams p;
        p.capacity_kwh = b.capacity_kwh;
        p.eta = b.eta;
        p.min_kwh = b.min_soc * b.capacity_kwh;
        p.max_kwh = b.max_soc * b.capacity_kwh;
        p.initial_kwh = b.initial_soc * b.capacity_kwh;
        p.final_kwh = b.final_soc * b.capacity_kwh;
        d.buses.push_back(p);
    }

    d.gamma.assign(static_cast<std::size_t>(J) * K * L, 0);
    d.discharge.assign(static_cast<std::size_t>(J) * K, 0.0);
    d.visit_at.assign(static_cast<std::size_t>(J) * K, -1);
    const auto ids = visit_ids(sc);

    for (int j = 0; j < J; ++j) {
        const Bus& bus = sc.buses[j];
        for (std::size_t bi = 0; bi < bus.schedule.size(); ++bi) {
            const ScheduleBlock& blk = bus.schedule[bi];
            if (blk.kind == BlockKind::on_route) {
                for (int k = 0; k < K; ++k) {
                    const double a = std::max(blk.start_min, d.time(k));
                    const double b = std::min(blk.end_min, d.time(k + 1));
                    if (b > a) d.discharge[static_cast<std::size_t>(j) * K + k] += blk.route_power_kw * (b - a) / 60.0;
                }
            } else if (blk.kind == BlockKind::in_station) {
                Visit v;
                v.id = ids[j][bi];
                v.bus = j;
                v.block = static_cast<int>(bi);
                for (const auto& cid : blk.chargers) v.chargers.push_back(sc.charger_index(cid));
                std::sort(v.chargers.begin(), v.chargers.end());
                v.k_begin = -1;
                for (int k = 0; k < K; ++k) {
                    // Whole step inside the block; small slack absorbs float noise on grid times.
                    if (d.time(k) >= blk.start_min - 1e-9 && d.time(k + 1) <= blk.end_min + 1e-9) {
                        if (v.k_begin < 0) v.k_begin = k;
                        v.k_end = k + 1;
                    }
                }
                if (v.k_begin < 0) continue;
                const int vi = static_cast<int>(d.visits.size());
                for (int k = v.k_begin; k < v.k_end; ++k) {
                    d.visit_at[static_cast<std::size_t>(j) * K + k] = vi;
                    for (int l : v.chargers) d.gamma[(static_cast<std::size_t>(j) * K + k) * L + l] = 1;
                }
                d.visits.push_back(std::move(v));
            }
        }
    }

    d.load.resize(K);
    d.rate.resize(K);
    d.tou.assign(K + 1, 0);
    for (int k = 0; k < K; ++k) {
        d.load[k] = sc.load_energy(d.time(k), d.time(k + 1));
        d.rate[k] = consumption_rate_at(sc.rates, d.time(k));
        // The window ending at t_{k+1} is on-peak when the step it closes starts on-peak.
        d.tou[k + 1] = sc.rates.is_peak(d.time(k)) ? 1 : 0;
    }
    return d;
}

DiscreteInstance discretize(const Scenario& sc, double delta_min) {
    return discretize(sc, delta_min, sc.day_start_min, sc.day_end_min);
}

}  // namespace beb
