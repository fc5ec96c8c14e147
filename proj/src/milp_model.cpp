#include "beb/milp.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <tuple>

#include "beb/charge_model.hpp"
#include "beb/errors.hpp"
#include "beb/format.hpp"

namespace beb {

std::string_view to_string(RowFamily f) {
    switch (f) {
        case RowFamily::flow: return "flow";
        case RowFamily::group: return "group";
        case RowFamily::dynamics: return "dynamics";
        case RowFamily::gain_cc: return "gain_cc";
        case RowFamily::gain_cv: return "gain_cv";
        case RowFamily::gain_bigm: return "gain_bigm";
        case RowFamily::gain_nonneg: return "gain_nonneg";
        case RowFamily::gain_fixed: return "gain_fixed";
        case RowFamily::energy: return "energy";
        case RowFamily::avg_power: return "avg_power";
        case RowFamily::p_max: return "p_max";
        case RowFamily::p_max_tou: return "p_max_tou";
        case RowFamily::soc_initial: return "soc_initial";
        case RowFamily::soc_final: return "soc_final";
        case RowFamily::soft_min: return "soft_min";
        case RowFamily::terminal: return "terminal";
        case RowFamily::lock: return "lock";
        case RowFamily::other: return "other";
    }
    return "?";
}

std::string_view to_string(VarRole r) {
    switch (r) {
        case VarRole::x: return "x";
        case VarRole::s: return "s";
        case VarRole::g: return "g";
        case VarRole::e: return "e";
        case VarRole::p: return "p";
        case VarRole::p_max: return "p_max";
        case VarRole::p_max_tou: return "p_max_tou";
        case VarRole::err: return "err";
        case VarRole::soft: return "soft";
    }
    return "?";
}

int MilpModel::add_var(Variable v) {
    vars.push_back(std::move(v));
    return n_vars() - 1;
}

int MilpModel::add_row(Constraint c) {
    rows.push_back(std::move(c));
    return n_rows() - 1;
}

int MilpModel::find_var(const std::string& name) const {
    for (int i = 0; i < n_vars(); ++i)
        if (vars[i].name == name) return i;
    return -1;
}

double MilpModel::objective(const std::vector<double>& x) const {
    double z = obj_offset;
    for (int i = 0; i < n_vars(); ++i) z += vars[i].obj * x[i];
    return z;
}

std::pair<int, double> MilpModel::window() const {
    const double ratio = rates.demand_window_min / inst->delta_min;
    const int m = static_cast<int>(std::floor(ratio + 1e-9));
    double frac = ratio - m;
    if (frac < 1e-9) frac = 0.0;
    return {m, frac};
}

namespace {

std::string idx_name(const char* base, std::initializer_list<int> parts) {
    std::string s = base;
    for (int p : parts) s += "_" + std::to_string(p);
    return s;
}

}  // namespace

MilpModel build_static_model(const ActionGraph& graph, const DiscreteInstance& inst, const RateSchedule& rates,
                             const ModelOptions& opt) {
    MilpModel m;
    m.inst = std::make_shared<const DiscreteInstance>(inst);
    m.graph = std::make_shared<const ActionGraph>(graph);
    m.rates = rates;
    m.options = opt;
    const int K = inst.n_steps, J = inst.n_buses, L = inst.n_chargers;
    const double dh = inst.delta_h();

    if (!opt.initial_kwh.empty() && static_cast<int>(opt.initial_kwh.size()) != J)
        throw ValidationError("initial_kwh must have one entry per bus");

    // Edge flows first so that variable i is edge i.
    for (int e = 0; e < graph.n_edges(); ++e) {
        const Edge& ed = graph.edges[e];
        Variable v;
        v.name = "x_" + std::to_string(e);
        v.lb = 0.0;
        v.ub = ed.capacity;
        v.integer = true;
        v.obj = ed.cost;
        v.role = VarRole::x;
        v.j = ed.bus;
        v.k = ed.k_from;
        v.l = ed.charger;
        m.add_var(v);
    }

    std::vector<DiscreteChargeParams> dparams(static_cast<std::size_t>(J) * L);
    for (int j = 0; j < J; ++j)
        for (int l = 0; l < L; ++l) {
            const auto c = continuous_params(inst.p_cc_kw[l], inst.alpha_of(j, l), inst.buses[j].eta,
                                             inst.buses[j].capacity_kwh);
            dparams[static_cast<std::size_t>(j) * L + l] = discretize_params(c, dh);
        }
    auto dp = [&](int j, int l) -> const DiscreteChargeParams& { return dparams[static_cast<std::size_t>(j) * L + l]; };

    m.s_idx.assign(static_cast<std::size_t>(J) * (K + 1), -1);
    std::vector<double> s_lo(J), s_hi(J), s0(J);
    for (int j = 0; j < J; ++j) {
        const BusParams& b = inst.buses[j];
        s0[j] = opt.initial_kwh.empty() ? b.initial_kwh : opt.initial_kwh[j];
        s_lo[j] = b.min_kwh + opt.soc_buffer * b.capacity_kwh;
        // A start above the buffered ceiling (noise) must not make the model infeasible by itself.
        s_hi[j] = std::max(b.max_kwh - opt.soc_buffer * b.capacity_kwh, std::min(s0[j], b.capacity_kwh));
        for (int k = 0; k <= K; ++k) {
            Variable v;
            v.name = idx_name("s", {j, k});
            v.role = VarRole::s;
            v.j = j;
            v.k = k;
            if (k == 0) {
                v.lb = 0.0;
                v.ub = b.capacity_kwh;
            } else {
                v.lb = opt.soft_min_soc ? 0.0 : s_lo[j];
                v.ub = s_hi[j];
            }
            m.s_idx[static_cast<std::size_t>(j) * (K + 1) + k] = m.add_var(v);
        }
    }

    m.g_idx.assign(static_cast<std::size_t>(J) * K * L, -1);
    std::vector<double> e_extra(K, 0.0);
    for (int j = 0; j < J; ++j)
        for (int k = 0; k < K; ++k)
            for (int l = 0; l < L; ++l) {
                if (!inst.available(j, k, l)) continue;
                Variable v;
                v.name = idx_name("g", {j, k, l});
                v.role = VarRole::g;
                v.lb = 0.0;
                v.ub = dp(j, l).b_bar_cc;
                v.obj = inst.rate[k];
                v.j = j;
                v.k = k;
                v.l = l;
                m.g_idx[(static_cast<std::size_t>(j) * K + k) * L + l] = m.add_var(v);
                e_extra[k] += dp(j, l).b_bar_cc;
            }

    m.e_idx.assign(K, -1);
    for (int k = 0; k < K; ++k) {
        Variable v;
        v.name = idx_name("e", {k});
        v.role = VarRole::e;
        v.lb = inst.load[k];
        v.ub = inst.load[k] + e_extra[k];
        v.k = k;
        m.e_idx[k] = m.add_var(v);
    }

    // Demand windows: p_k averages the m steps before t_k plus a fractional older step.
    const auto [mw, frac] = m.window();
    const double inv_delta_h = 60.0 / rates.demand_window_min;
    const auto& hist = opt.history_energy;
    auto window_terms = [&](int k, std::vector<std::pair<int, double>>& terms, double& constant) {
        terms.clear();
        constant = 0.0;
        auto add = [&](int kp, double w) {
            if (w == 0.0) return;
            if (kp >= 0) {
                terms.emplace_back(kp, w);
            } else {
                const int back = -kp;  // e_{-1} is the most recent realized step
                if (back <= static_cast<int>(hist.size())) constant += w * hist[hist.size() - back];
            }
        };
        for (int kp = k - mw; kp <= k - 1; ++kp) add(kp, inv_delta_h);
        add(k - mw - 1, frac * inv_delta_h);
    };

    m.p_idx.assign(K + 1, -1);
    std::vector<std::pair<int, double>> terms;
    double p_ub_all = 0.0, p_ub_tou = 0.0;
    std::vector<double> p_lb(K + 1, 0.0), p_ub(K + 1, 0.0);
    for (int k = 1; k <= K; ++k) {
        double c;
        window_terms(k, terms, c);
        double lo = c, hi = c;
        for (auto [kp, w] : terms) {
            lo += w * m.vars[m.e_idx[kp]].lb;
            hi += w * m.vars[m.e_idx[kp]].ub;
        }
        p_lb[k] = lo;
        p_ub[k] = hi;
        p_ub_all = std::max(p_ub_all, hi);
        if (inst.tou[k]) p_ub_tou = std::max(p_ub_tou, hi);
        Variable v;
        v.name = idx_name("p", {k});
        v.role = VarRole::p;
        v.lb = lo;
        v.ub = hi;
        v.k = k;
        m.p_idx[k] = m.add_var(v);
    }
    {
        Variable v;
        v.name = "p_max";
        v.role = VarRole::p_max;
        v.lb = opt.p_max_floor;
        v.ub = std::max(opt.p_max_floor, p_ub_all);
        v.obj = rates.c_b;
        m.p_max_idx = m.add_var(v);
        v.name = "p_max_tou";
        v.role = VarRole::p_max_tou;
        v.lb = opt.p_max_tou_floor;
        v.ub = std::max(opt.p_max_tou_floor, p_ub_tou);
        v.obj = rates.c_tou;
        m.p_max_tou_idx = m.add_var(v);
    }
    if (opt.soft_min_soc) {
        for (int j = 0; j < J; ++j) {
            Variable v;
            v.name = idx_name("soft", {j});
            v.role = VarRole::soft;
            v.lb = 0.0;
            v.ub = std::max(0.0, s_lo[j]);
            v.obj = opt.soft_penalty;
            v.j = j;
            m.soft_idx.push_back(m.add_var(v));
        }
    }

    // Flow balance per sub-graph vertex.
    for (int l = 0; l < L; ++l) {
        const Subgraph& sg = graph.subgraphs[l];
        const auto f = supply_vector(graph, l);
        std::vector<Constraint> vrows(sg.vertices.size());
        for (std::size_t v = 0; v < sg.vertices.size(); ++v) {
            vrows[v].name = idx_name("flow", {l, static_cast<int>(v)});
            vrows[v].rel = Relation::eq;
            vrows[v].rhs = f[v];
            vrows[v].family = RowFamily::flow;
        }
        for (int e = sg.edge_begin; e < sg.edge_end; ++e) {
            vrows[graph.edges[e].tail].idx.push_back(e);
            vrows[graph.edges[e].tail].coef.push_back(1.0);
            vrows[graph.edges[e].head].idx.push_back(e);
            vrows[graph.edges[e].head].coef.push_back(-1.0);
        }
        for (auto& r : vrows) m.add_row(std::move(r));
    }

    for (std::size_t p = 0; p < graph.groups.size(); ++p) {
        Constraint c;
        c.name = idx_name("group", {graph.groups[p].visit_id});
        c.rel = Relation::le;
        c.rhs = 1.0;
        c.family = RowFamily::group;
        for (int e : graph.groups[p].entering) {
            c.idx.push_back(e);
            c.coef.push_back(1.0);
        }
        m.add_row(std::move(c));
    }

    auto S = [&](int j, int k) { return m.s_idx[static_cast<std::size_t>(j) * (K + 1) + k]; };
    auto G = [&](int j, int k, int l) { return m.g_idx[(static_cast<std::size_t>(j) * K + k) * L + l]; };

    for (int j = 0; j < J; ++j)
        for (int k = 0; k < K; ++k) {
            Constraint c;
            c.name = idx_name("dyn", {j, k});
            c.rel = Relation::eq;
            c.family = RowFamily::dynamics;
            c.idx = {S(j, k + 1), S(j, k)};
            c.coef = {1.0, -1.0};
            if (inst.any_available(j, k)) {
                for (int l = 0; l < L; ++l)
                    if (G(j, k, l) >= 0) {
                        c.idx.push_back(G(j, k, l));
                        c.coef.push_back(-1.0);
                    }
                c.rhs = 0.0;
            } else {
                c.rhs = -inst.discharge_at(j, k);
            }
            m.add_row(std::move(c));
        }

    for (int j = 0; j < J; ++j)
        for (int k = 0; k < K; ++k)
            for (int l = 0; l < L; ++l) {
                const int g = G(j, k, l);
                if (g < 0) continue;
                const auto& d = dp(j, l);
                const int x = graph.charge_edge(j, k, l);
                if (opt.fixed_rate) {
                    m.add_row({idx_name("gfix", {j, k, l}), {g, x}, {1.0, -d.b_bar_cc}, Relation::eq, 0.0,
                               RowFamily::gain_fixed});
                } else {
                    m.add_row({idx_name("gcc", {j, k, l}), {g}, {1.0}, Relation::le, d.b_bar_cc, RowFamily::gain_cc});
                }
                if (!opt.linear_profile)
                    m.add_row({idx_name("gcv", {j, k, l}), {g, S(j, k)}, {1.0, -(d.a_bar_cv - 1.0)}, Relation::le,
                               d.b_bar_cv, RowFamily::gain_cv});
                m.add_row({idx_name("gbm", {j, k, l}), {g, x}, {1.0, -inst.buses[j].capacity_kwh}, Relation::le, 0.0,
                           RowFamily::gain_bigm});
                m.add_row({idx_name("gnn", {j, k, l}), {g}, {1.0}, Relation::ge, 0.0, RowFamily::gain_nonneg});
            }

    for (int k = 0; k < K; ++k) {
        Constraint c;
        c.name = idx_name("energy", {k});
        c.rel = Relation::eq;
        c.rhs = inst.load[k];
        c.family = RowFamily::energy;
        c.idx.push_back(m.e_idx[k]);
        c.coef.push_back(1.0);
        for (int j = 0; j < J; ++j)
            for (int l = 0; l < L; ++l)
                if (G(j, k, l) >= 0) {
                    c.idx.push_back(G(j, k, l));
                    c.coef.push_back(-1.0);
                }
        m.add_row(std::move(c));
    }

    for (int k = 1; k <= K; ++k) {
        double constant;
        window_terms(k, terms, constant);
        Constraint c;
        c.name = idx_name("avg", {k});
        c.rel = Relation::eq;
        c.rhs = constant;
        c.family = RowFamily::avg_power;
        c.idx.push_back(m.p_idx[k]);
        c.coef.push_back(1.0);
        for (auto [kp, w] : terms) {
            c.idx.push_back(m.e_idx[kp]);
            c.coef.push_back(-w);
        }
        m.add_row(std::move(c));
    }
    for (int k = 1; k <= K; ++k)
        m.add_row({idx_name("pmax", {k}), {m.p_max_idx, m.p_idx[k]}, {1.0, -1.0}, Relation::ge, 0.0, RowFamily::p_max});
    for (int k = 1; k <= K; ++k)
        if (inst.tou[k])
            m.add_row({idx_name("ptou", {k}), {m.p_max_tou_idx, m.p_idx[k]}, {1.0, -1.0}, Relation::ge, 0.0,
                       RowFamily::p_max_tou});

    for (int j = 0; j < J; ++j) {
        m.add_row({idx_name("init", {j}), {S(j, 0)}, {1.0}, Relation::eq, s0[j], RowFamily::soc_initial});
        // Whole-step gains almost never land exactly on the target, so fixed
        // rate only asks to end at or above it.
        if (opt.final_soc_equality)
            m.add_row({idx_name("final", {j}), {S(j, K)}, {1.0}, opt.fixed_rate ? Relation::ge : Relation::eq,
                       inst.buses[j].final_kwh, RowFamily::soc_final});
        if (opt.soft_min_soc)
            for (int k = 1; k <= K; ++k)
                m.add_row({idx_name("softmin", {j, k}), {S(j, k), m.soft_idx[j]}, {1.0, 1.0}, Relation::ge, s_lo[j],
                           RowFamily::soft_min});
    }
    return m;
}

void add_terminal_cost(MilpModel& m, const std::vector<double>& target, double weight) {
    const int K = m.inst->n_steps, J = m.inst->n_buses;
    if (static_cast<int>(target.size()) != J) throw ValidationError("terminal target needs one value per bus");
    if (!m.err_idx.empty()) throw ValidationError("terminal cost already added");
    m.terminal_weight = weight;
    for (int j = 0; j < J; ++j) {
        const int sK = m.s_idx[static_cast<std::size_t>(j) * (K + 1) + K];
        if (sK < 0) throw ValidationError("model has no terminal SOC variable");
        Variable v;
        v.name = "err_" + std::to_string(j);
        v.role = VarRole::err;
        v.lb = 0.0;
        v.ub = m.inst->buses[j].capacity_kwh + std::abs(target[j]);
        v.obj = weight;
        v.j = j;
        const int e = m.add_var(v);
        m.err_idx.push_back(e);
        m.add_row({"term_hi_" + std::to_string(j), {e, sK}, {1.0, -1.0}, Relation::ge, -target[j], RowFamily::terminal});
        m.add_row({"term_lo_" + std::to_string(j), {e, sK}, {1.0, 1.0}, Relation::ge, target[j], RowFamily::terminal});
    }
}

void lock_charged_visits(MilpModel& m, const std::set<int>& charged, const std::set<std::pair<int, int>>& connected) {
    const ActionGraph& g = *m.graph;
    for (int vid : charged) {
        const VisitGroup* grp = nullptr;
        for (const auto& gr : g.groups)
            if (gr.visit_id == vid) grp = &gr;
        if (!grp) throw ValidationError("unknown visit id " + std::to_string(vid) + " for this horizon");
        Constraint c;
        c.name = "lock_" + std::to_string(vid);
        c.rel = Relation::le;
        c.rhs = 0.0;
        c.family = RowFamily::lock;
        for (int e : grp->entering) {
            const Edge& ed = g.edges[e];
            if (ed.k_from == 0 && connected.count({vid, ed.charger})) continue;
            c.idx.push_back(e);
            c.coef.push_back(1.0);
        }
        if (!c.idx.empty()) m.add_row(std::move(c));
    }
}

std::string ResidualReport::summary() const {
    std::ostringstream s;
    s << (pass ? "pass" : "FAIL") << " worst=" << worst;
    if (!worst_name.empty()) s << " at " << worst_name;
    for (const auto& f : families)
        if (f.max_violation > 0) s << "; " << f.family << "=" << f.max_violation << " (" << f.worst << ")";
    return s.str();
}

ResidualReport validate_solution(const MilpModel& m, const std::vector<double>& x, double tol) {
    ResidualReport rep;
    if (static_cast<int>(x.size()) != m.n_vars()) {
        rep.pass = false;
        rep.worst = INFINITY;
        rep.worst_name = "assignment size";
        return rep;
    }
    std::map<std::string, FamilyResidual> fam;
    auto note = [&](const std::string& family, double viol, const std::string& name) {
        auto& f = fam[family];
        f.family = family;
        if (viol > f.max_violation || f.worst.empty()) {
            f.max_violation = std::max(f.max_violation, viol);
            f.worst = name;
        }
        if (viol > rep.worst) {
            rep.worst = viol;
            rep.worst_name = name;
        }
    };
    for (const auto& r : m.rows) {
        double act = 0.0;
        for (std::size_t t = 0; t < r.idx.size(); ++t) act += r.coef[t] * x[r.idx[t]];
        double v = 0.0;
        switch (r.rel) {
            case Relation::le: v = std::max(0.0, act - r.rhs); break;
            case Relation::ge: v = std::max(0.0, r.rhs - act); break;
            case Relation::eq: v = std::abs(act - r.rhs); break;
        }
        note(std::string(to_string(r.family)), v, r.name);
    }
    for (int i = 0; i < m.n_vars(); ++i) {
        const auto& v = m.vars[i];
        note("bounds", std::max({0.0, v.lb - x[i], x[i] - v.ub}), v.name);
        if (v.integer) note("integrality", std::abs(x[i] - std::round(x[i])), v.name);
    }
    for (auto& [k, f] : fam) rep.families.push_back(f);
    rep.pass = rep.worst <= tol;
    return rep;
}

ChargePlan extract_plan(const MilpModel& m, const std::vector<double>& x) {
    const auto rep = validate_solution(m, x);
    if (!rep.pass) throw ValidationError("infeasible assignment: " + rep.summary());
    const DiscreteInstance& inst = *m.inst;
    const ActionGraph& g = *m.graph;
    const int K = inst.n_steps, J = inst.n_buses, L = inst.n_chargers;

    ChargePlan p;
    p.t0_min = inst.t0_min;
    p.delta_min = inst.delta_min;
    p.n_steps = K;
    p.n_buses = J;
    p.n_chargers = L;
    p.gains.assign(static_cast<std::size_t>(J) * K * L, 0.0);
    p.soc.assign(static_cast<std::size_t>(J) * (K + 1), 0.0);
    p.bus_energy.assign(K, 0.0);
    p.load_energy = inst.load;
    p.p_avg.assign(K + 1, 0.0);

    for (int j = 0; j < J; ++j)
        for (int k = 0; k <= K; ++k)
            p.soc[static_cast<std::size_t>(j) * (K + 1) + k] = x[m.s_idx[static_cast<std::size_t>(j) * (K + 1) + k]];

    double consumption = 0.0;
    for (int j = 0; j < J; ++j)
        for (int k = 0; k < K; ++k)
            for (int l = 0; l < L; ++l) {
                const int gi = m.g_idx[(static_cast<std::size_t>(j) * K + k) * L + l];
                if (gi < 0) continue;
                // Clip solver noise; the residual check above already bounded it.
                const double v = std::max(0.0, x[gi]);
                p.gains[(static_cast<std::size_t>(j) * K + k) * L + l] = v;
                p.bus_energy[k] += v;
                consumption += inst.rate[k] * x[gi];
            }

    for (int j = 0; j < J; ++j)
        for (int l = 0; l < L; ++l) {
            int k = 0;
            while (k < K) {
                const int e = g.charge_edge(j, k, l);
                if (e < 0 || x[e] < 0.5) {
                    ++k;
                    continue;
                }
                ChargeInterval iv;
                iv.bus = j;
                iv.charger = l;
                iv.visit_id = inst.visits[g.edges[e].visit].id;
                iv.k_begin = k;
                const int visit = g.edges[e].visit;
                while (k < K) {
                    const int e2 = g.charge_edge(j, k, l);
                    if (e2 < 0 || x[e2] < 0.5 || g.edges[e2].visit != visit) break;
                    iv.kwh += p.gains[(static_cast<std::size_t>(j) * K + k) * L + l];
                    ++k;
                }
                iv.k_end = k;
                iv.start_min = inst.time(iv.k_begin);
                iv.end_min = inst.time(iv.k_end);
                p.intervals.push_back(iv);
            }
        }
    std::sort(p.intervals.begin(), p.intervals.end(), [](const ChargeInterval& a, const ChargeInterval& b) {
        return std::tie(a.start_min, a.bus, a.charger) < std::tie(b.start_min, b.bus, b.charger);
    });

    for (int k = 1; k <= K; ++k) p.p_avg[k] = x[m.p_idx[k]];
    p.p_max = x[m.p_max_idx];
    p.p_max_tou = x[m.p_max_tou_idx];

    double other = m.obj_offset;
    for (int e = 0; e < g.n_edges(); ++e) other += m.vars[e].obj * x[e];
    for (int i : m.err_idx) other += m.vars[i].obj * x[i];
    for (int i : m.soft_idx) other += m.vars[i].obj * x[i];
    p.cost.consumption = consumption;
    p.cost.baseline = m.rates.c_b * p.p_max;
    p.cost.tou = m.rates.c_tou * p.p_max_tou;
    p.cost.other = other;
    p.objective = m.objective(x);
    if (std::abs(p.cost.total() - p.objective) > 1e-6 * std::max(1.0, std::abs(p.objective)))
        throw ValidationError("cost breakdown " + fmt_num(p.cost.total()) + " does not match objective " +
                              fmt_num(p.objective));
    return p;
}

}  // namespace beb
