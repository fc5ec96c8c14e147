#include <algorithm>
#include <cmath>
#include <set>

#include "beb/charge_model.hpp"
#include "beb/solver.hpp"

namespace beb::solver {

namespace {

// Value of the first variable of `r` that makes the row tight, given the rest.
double solve_first(const Constraint& r, const std::vector<double>& x) {
    double s = r.rhs;
    for (std::size_t t = 1; t < r.idx.size(); ++t) s -= r.coef[t] * x[r.idx[t]];
    return s / r.coef[0];
}

}  // namespace

std::vector<double> build_warm_start(const MilpModel& model, const ChargePlan& previous, const ChargePlan& reference) {
    const DiscreteInstance& inst = *model.inst;
    const ActionGraph& g = *model.graph;
    const int K = inst.n_steps, J = inst.n_buses, L = inst.n_chargers;
    std::vector<double> x(model.n_vars(), 0.0);

    std::set<int> forbidden;
    for (const auto& r : model.rows)
        if (r.family == RowFamily::lock) forbidden.insert(r.idx.begin(), r.idx.end());

    // Charger type per (bus, step): previous plan where it reaches, reference beyond.
    std::vector<int> chosen(static_cast<std::size_t>(J) * K, -1);
    auto at = [&](int j, int k) -> int& { return chosen[static_cast<std::size_t>(j) * K + k]; };
    for (int j = 0; j < J; ++j)
        for (int k = 0; k < K; ++k) {
            const double tm = inst.time(k) + 0.5 * inst.delta_min;
            const ChargePlan* src = nullptr;
            if (!previous.empty() && tm >= previous.t0_min && tm < previous.t1_min())
                src = &previous;
            else if (!reference.empty() && tm >= reference.t0_min && tm < reference.t1_min())
                src = &reference;
            if (!src || j >= src->n_buses) continue;
            const ChargeInterval* iv = src->interval_at(j, tm);
            if (!iv || iv->charger >= L) continue;
            const int e = inst.available(j, k, iv->charger) ? g.charge_edge(j, k, iv->charger) : -1;
            if (e >= 0 && !forbidden.count(e)) at(j, k) = iv->charger;
        }

    // One contiguous run per visit, not entering through a locked edge, within supply.
    std::vector<int> busy(static_cast<std::size_t>(K) * L, 0);
    std::vector<std::uint8_t> keep(chosen.size(), 0);
    for (std::size_t vi = 0; vi < inst.visits.size(); ++vi) {
        const Visit& v = inst.visits[vi];
        const int j = v.bus;
        int kb = -1, l = -1;
        for (int k = v.k_begin; k < v.k_end; ++k)
            if (at(j, k) >= 0) {
                kb = k;
                l = at(j, k);
                break;
            }
        if (kb < 0) continue;
        int ke = kb;
        while (ke < v.k_end && at(j, ke) == l) ++ke;
        const int enter = g.enter_edge(static_cast<int>(vi), kb, l);
        const int leave = g.exit_edge(static_cast<int>(vi), ke, l);
        if (enter < 0 || leave < 0 || forbidden.count(enter)) continue;
        bool fits = true;
        for (int k = kb; k < ke; ++k) fits = fits && busy[static_cast<std::size_t>(k) * L + l] < g.subgraphs[l].supply;
        if (!fits) continue;
        for (int k = kb; k < ke; ++k) {
            ++busy[static_cast<std::size_t>(k) * L + l];
            keep[static_cast<std::size_t>(j) * K + k] = 1;
            x[g.charge_edge(j, k, l)] = 1.0;
        }
        x[enter] = 1.0;
        x[leave] = 1.0;
    }
    for (std::size_t i = 0; i < chosen.size(); ++i)
        if (!keep[i]) chosen[i] = -1;

    // Rest chains carry whatever is not plugged in.
    for (int l = 0; l < L; ++l) {
        const Subgraph& sg = g.subgraphs[l];
        for (int e = sg.edge_begin; e < sg.edge_end; ++e) {
            const Edge& ed = g.edges[e];
            if (ed.kind == EdgeKind::source || ed.kind == EdgeKind::sink) {
                x[e] = sg.supply;
            } else if (ed.kind == EdgeKind::rest) {
                x[e] = sg.supply - busy[static_cast<std::size_t>(ed.k_from) * L + l];
            }
        }
    }

    // Gains by forward simulation of the discrete charge model.
    std::vector<double> s0(J, 0.0);
    for (const auto& r : model.rows)
        if (r.family == RowFamily::soc_initial) {
            const int idx = r.idx[0];
            s0[model.vars[idx].j] = r.rhs / r.coef[0];
        }
    for (int j = 0; j < J; ++j) {
        double s = s0[j];
        x[model.s_idx[static_cast<std::size_t>(j) * (K + 1)]] = s;
        for (int k = 0; k < K; ++k) {
            const int next = model.s_idx[static_cast<std::size_t>(j) * (K + 1) + k + 1];
            if (inst.any_available(j, k)) {
                const int l = at(j, k);
                if (l >= 0) {
                    const auto c = continuous_params(inst.p_cc_kw[l], inst.alpha_of(j, l), inst.buses[j].eta,
                                                     inst.buses[j].capacity_kwh);
                    const auto d = discretize_params(c, inst.delta_h());
                    double gain = d.b_bar_cc;
                    if (!model.options.fixed_rate) {
                        if (!model.options.linear_profile) gain = std::min(gain, (d.a_bar_cv - 1.0) * s + d.b_bar_cv);
                        gain = std::min(gain, model.vars[next].ub - s);
                        gain = std::max(0.0, gain);
                    }
                    x[model.g_idx[(static_cast<std::size_t>(j) * K + k) * L + l]] = gain;
                    s += gain;
                }
            } else {
                s -= inst.discharge_at(j, k);
            }
            x[next] = s;
        }
    }

    // Derived quantities straight from their defining rows.
    for (const auto& r : model.rows)
        if (r.family == RowFamily::energy) x[r.idx[0]] = solve_first(r, x);
    for (const auto& r : model.rows)
        if (r.family == RowFamily::avg_power) x[r.idx[0]] = solve_first(r, x);
    double pm = model.vars[model.p_max_idx].lb, pt = model.vars[model.p_max_tou_idx].lb;
    for (const auto& r : model.rows) {
        if (r.family == RowFamily::p_max) pm = std::max(pm, x[r.idx[1]]);
        if (r.family == RowFamily::p_max_tou) pt = std::max(pt, x[r.idx[1]]);
    }
    x[model.p_max_idx] = pm;
    x[model.p_max_tou_idx] = pt;
    for (const auto& r : model.rows) {
        if (r.family == RowFamily::terminal) {
            // err - s >= -target  or  err + s >= target
            x[r.idx[0]] = std::max(x[r.idx[0]], r.rhs - r.coef[1] * x[r.idx[1]]);
        } else if (r.family == RowFamily::soft_min) {
            x[r.idx[1]] = std::max(x[r.idx[1]], r.rhs - x[r.idx[0]]);
        }
    }

    if (!validate_solution(model, x).pass) return {};
    return x;
}

}  // namespace beb::solver
