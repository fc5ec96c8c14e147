#include "beb/receding_horizon.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "beb/discretize.hpp"
#include "beb/errors.hpp"
#include "beb/graph.hpp"
#include "beb/milp.hpp"

namespace beb {

namespace {

constexpr std::size_t kHistoryKeep = 64;

// Mean power over the demand window ending at the newest history entry,
// weighted the same way as the model's window rows.
double trailing_window_kw(const std::vector<double>& hist, double delta_min, double window_min) {
    const double ratio = window_min / delta_min;
    const int m = static_cast<int>(std::floor(ratio + 1e-9));
    double frac = ratio - m;
    if (frac < 1e-9) frac = 0.0;
    const int n = static_cast<int>(hist.size());
    double kwh = 0.0;
    for (int i = 1; i <= m && i <= n; ++i) kwh += hist[n - i];
    if (frac > 0.0 && m + 1 <= n) kwh += frac * hist[n - m - 1];
    return kwh / (window_min / 60.0);
}

// Charger types offered by the station block bus j is scheduled in at t, if any.
std::vector<int> scheduled_chargers(const Scenario& sc, int j, double t) {
    std::vector<int> out;
    for (const auto& b : sc.buses[j].schedule) {
        if (b.kind != BlockKind::in_station || t < b.start_min || t >= b.end_min) continue;
        for (const auto& id : b.chargers) out.push_back(sc.charger_index(id));
    }
    return out;
}

std::vector<std::uint8_t> absent_buses(const Scenario& sc, const Environment& env, double t) {
    std::vector<std::uint8_t> out(sc.buses.size(), 0);
    for (std::size_t j = 0; j < sc.buses.size(); ++j) {
        const auto ls = scheduled_chargers(sc, static_cast<int>(j), t);
        if (ls.empty()) continue;
        bool here = false;
        for (int l : ls) here = here || env.at_station(static_cast<int>(j), l, t);
        out[j] = here ? 0 : 1;
    }
    return out;
}

}  // namespace

HorizonConfig resolve(const HorizonConfig& cfg, const Scenario& sc) {
    HorizonConfig out = cfg;
    const auto& r = sc.rates;
    if (out.terminal_weight < 0) out.terminal_weight = std::max(r.c_onpeak, r.c_offpeak);
    if (out.preference_bonus < 0) {
        double smallest = INFINITY;
        for (double c : {r.c_offpeak, r.c_onpeak, r.c_b, r.c_tou, out.terminal_weight})
            if (c > 0) smallest = std::min(smallest, c);
        out.preference_bonus = std::isfinite(smallest) ? 1e-3 * smallest : 0.0;
    }
    if (!(out.horizon_min >= out.delta_rh_min && out.delta_rh_min > 0))
        throw ValidationError("horizon must be at least one step and the step positive");
    return out;
}

ExecutionState initial_state(const Scenario& sc, double clock, const std::vector<double>& soc) {
    ExecutionState st;
    st.clock = clock;
    st.soc = soc;
    st.absent.assign(sc.buses.size(), 0);
    return st;
}

HorizonPlan plan_horizon(const ExecutionState& state, const Scenario& sc, const ChargePlan& reference,
                         const HorizonConfig& cfg_in) {
    const HorizonConfig cfg = resolve(cfg_in, sc);
    HorizonPlan out;
    const double t0 = state.clock;
    const double t1 = std::min(t0 + cfg.horizon_min, sc.day_end_min);
    if (t1 - t0 < cfg.delta_rh_min - 1e-9) return out;

    const DiscreteInstance inst = discretize(sc, cfg.delta_rh_min, t0, t1);
    ActionGraph graph = build_action_graph(inst);
    if (cfg.preference_bonus > 0 && !state.previous_plan.empty())
        graph = apply_plan_preference(graph, close_edges(graph, state.previous_plan), cfg.preference_bonus);

    std::vector<double> target(inst.n_buses);
    for (int j = 0; j < inst.n_buses; ++j)
        target[j] = reference.empty() ? inst.buses[j].final_kwh : reference.soc_at(j, inst.t1_min());

    std::set<int> in_horizon;
    for (const auto& g : graph.groups) in_horizon.insert(g.visit_id);
    std::set<int> locked;
    for (int v : state.charged_visits)
        if (in_horizon.count(v)) locked.insert(v);

    auto build = [&](bool soft) {
        ModelOptions o;
        o.soc_buffer = cfg.soc_buffer;
        o.final_soc_equality = false;
        o.initial_kwh = state.soc;
        o.history_energy = state.energy_history;
        o.p_max_floor = state.realized_p_max;
        o.p_max_tou_floor = state.realized_p_max_tou;
        if (cfg.reference_demand_floor && !reference.empty()) {
            o.p_max_floor = std::max(o.p_max_floor, reference.p_max);
            o.p_max_tou_floor = std::max(o.p_max_tou_floor, reference.p_max_tou);
        }
        o.soft_min_soc = soft;
        o.soft_penalty = cfg.soft_penalty_factor * cfg.terminal_weight;
        MilpModel m = build_static_model(graph, inst, sc.rates, o);
        add_terminal_cost(m, target, cfg.terminal_weight);
        lock_charged_visits(m, locked, state.connected);
        for (int j = 0; j < inst.n_buses; ++j) {
            if (j >= static_cast<int>(state.absent.size()) || !state.absent[j]) continue;
            for (int l = 0; l < inst.n_chargers; ++l) {
                const int e = graph.charge_edge(j, 0, l);
                if (e >= 0)
                    m.add_row({"absent_" + std::to_string(j) + "_" + std::to_string(l), {e}, {1.0}, Relation::le, 0.0,
                               RowFamily::lock});
            }
        }
        return m;
    };

    for (bool soft : {false, true}) {
        const MilpModel model = build(soft);
        const auto warm = solver::build_warm_start(model, state.previous_plan, reference);
        const auto sol = solver::branch_and_bound(model, cfg.limits, warm.empty() ? nullptr : &warm);
        out.nodes += sol.nodes_explored;
        out.status = sol.status;
        if (!sol.has_solution()) continue;
        out.plan = extract_plan(model, sol.x);
        out.used_soft_min = soft;
        out.feasible = true;
        break;
    }
    return out;
}

ExecutionState step(const ExecutionState& state, const HorizonPlan& hp, const Scenario& sc, const HorizonConfig& cfg_in,
                    Environment& env) {
    const HorizonConfig cfg = resolve(cfg_in, sc);
    const int J = static_cast<int>(sc.buses.size());
    const double dt = std::min(cfg.delta_rh_min, sc.day_end_min - state.clock);

    std::vector<BusCommand> cmd(J);
    std::vector<int> visit_of(J, -1);
    if (hp.feasible) {
        const ChargePlan& p = hp.plan;
        for (const auto& iv : p.intervals) {
            if (iv.k_begin != 0) continue;
            cmd[iv.bus].charger = iv.charger;
            cmd[iv.bus].power_kw = p.gain(iv.bus, 0, iv.charger) / (p.delta_min / 60.0);
            visit_of[iv.bus] = iv.visit_id;
        }
    }
    const StepOutcome out = env.advance(cmd, dt);

    ExecutionState next;
    next.clock = env.clock();
    next.soc = env.soc();
    next.charged_visits = state.charged_visits;
    for (int j = 0; j < J; ++j) {
        if (cmd[j].charger < 0 || out.charger[j] != cmd[j].charger) continue;
        next.charged_visits.insert(visit_of[j]);
        if (env.at_station(j, cmd[j].charger, next.clock)) next.connected.insert({visit_of[j], cmd[j].charger});
    }
    next.energy_history = state.energy_history;
    next.energy_history.push_back(out.bus_energy + out.load_energy);
    if (next.energy_history.size() > kHistoryKeep)
        next.energy_history.erase(next.energy_history.begin(),
                                  next.energy_history.end() - static_cast<std::ptrdiff_t>(kHistoryKeep));
    const double p = trailing_window_kw(next.energy_history, cfg.delta_rh_min, sc.rates.demand_window_min);
    next.realized_p_max = std::max(state.realized_p_max, p);
    next.realized_p_max_tou = state.realized_p_max_tou;
    if (sc.rates.is_peak(next.clock - dt)) next.realized_p_max_tou = std::max(next.realized_p_max_tou, p);
    next.absent = absent_buses(sc, env, next.clock);
    if (hp.feasible) next.previous_plan = hp.plan;
    return next;
}

ExecutedTrajectory run_day(const Scenario& sc, const ChargePlan& reference, const HorizonConfig& cfg_in,
                           Environment& env) {
    const HorizonConfig cfg = resolve(cfg_in, sc);
    ExecutionState state = initial_state(sc, env.clock(), env.soc());
    state.absent = absent_buses(sc, env, state.clock);
    int fallbacks = 0, limits = 0, failures = 0;
    std::ostringstream diag;
    while (state.clock < sc.day_end_min - 1e-9) {
        HorizonPlan hp = plan_horizon(state, sc, reference, cfg);
        if (hp.used_soft_min) ++fallbacks;
        if (hp.status == solver::MilpStatus::feasible_limit) ++limits;
        if (!hp.feasible && sc.day_end_min - state.clock >= cfg.delta_rh_min - 1e-9) {
            if (failures++ == 0) diag << "no feasible horizon plan at t=" << format_hhmm(state.clock);
        }
        state = step(state, hp, sc, cfg, env);
    }
    ExecutedTrajectory tr = env.trajectory();
    tr.fallbacks = fallbacks;
    tr.solver_limits = limits;
    tr.failed = failures > 0;
    tr.diagnostics = diag.str();
    return tr;
}

}  // namespace beb
