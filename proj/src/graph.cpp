#include "beb/graph.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>
#include <tuple>

#include "beb/format.hpp"

namespace beb {

std::string_view to_string(EdgeKind kind) {
    switch (kind) {
        case EdgeKind::charge: return "charge";
        case EdgeKind::rest: return "rest";
        case EdgeKind::transition: return "transition";
        case EdgeKind::source: return "source";
        case EdgeKind::sink: return "sink";
    }
    return "?";
}

ActionGraph build_action_graph(const DiscreteInstance& inst) {
    ActionGraph g;
    const int K = inst.n_steps, L = inst.n_chargers, J = inst.n_buses;
    const int V = static_cast<int>(inst.visits.size());
    g.n_steps = K;
    g.n_buses = J;
    g.n_chargers = L;
    g.t0_min = inst.t0_min;
    g.delta_min = inst.delta_min;
    g.sigma.assign(static_cast<std::size_t>(J) * K * L, -1);
    g.enter_idx.assign(static_cast<std::size_t>(V) * (K + 1) * L, -1);
    g.exit_idx.assign(static_cast<std::size_t>(V) * (K + 1) * L, -1);

    // (visit, l) -> local vertex of each time index in [k_begin, k_end].
    std::vector<std::vector<int>> charge_vertex(static_cast<std::size_t>(V) * L);

    for (int l = 0; l < L; ++l) {
        Subgraph sg;
        sg.charger = l;
        sg.supply = inst.charger_count[l];
        sg.vertices.push_back({VertexKind::source, -1, -1, -1});
        std::vector<int> rest(K + 1);
        for (int k = 0; k <= K; ++k) {
            for (int v = 0; v < V; ++v) {
                const Visit& vis = inst.visits[v];
                if (!std::binary_search(vis.chargers.begin(), vis.chargers.end(), l)) continue;
                if (k < vis.k_begin || k > vis.k_end) continue;
                auto& cv = charge_vertex[static_cast<std::size_t>(v) * L + l];
                cv.push_back(static_cast<int>(sg.vertices.size()));
                sg.vertices.push_back({VertexKind::charging, k, vis.bus, v});
            }
            rest[k] = static_cast<int>(sg.vertices.size());
            sg.vertices.push_back({VertexKind::rest, k, -1, -1});
        }
        sg.vertices.push_back({VertexKind::sink, K, -1, -1});

        const int n = sg.supply;
        std::vector<Edge> es;
        es.push_back({sg.source(), rest[0], EdgeKind::source, l, -1, -1, 0, 0, n, 0.0});
        for (int k = 0; k < K; ++k)
            es.push_back({rest[k], rest[k + 1], EdgeKind::rest, l, -1, -1, k, k + 1, n, 0.0});
        es.push_back({rest[K], sg.sink(), EdgeKind::sink, l, -1, -1, K, K, n, 0.0});
        for (int v = 0; v < V; ++v) {
            const auto& cv = charge_vertex[static_cast<std::size_t>(v) * L + l];
            if (cv.empty()) continue;
            const Visit& vis = inst.visits[v];
            for (int k = vis.k_begin; k < vis.k_end; ++k) {
                const int here = cv[k - vis.k_begin], next = cv[k + 1 - vis.k_begin];
                es.push_back({rest[k], here, EdgeKind::transition, l, vis.bus, v, k, k, 1, 0.0});
                es.push_back({here, next, EdgeKind::charge, l, vis.bus, v, k, k + 1, 1, 0.0});
            }
            for (int k = vis.k_begin + 1; k <= vis.k_end; ++k)
                es.push_back({cv[k - vis.k_begin], rest[k], EdgeKind::transition, l, vis.bus, v, k, k, 1, 0.0});
        }
        std::sort(es.begin(), es.end(), [](const Edge& a, const Edge& b) {
            return std::tie(a.tail, a.head) < std::tie(b.tail, b.head);
        });

        sg.edge_begin = g.n_edges();
        for (const Edge& e : es) {
            const int idx = g.n_edges();
            g.edges.push_back(e);
            if (e.kind == EdgeKind::charge) {
                g.sigma[(static_cast<std::size_t>(e.bus) * K + e.k_from) * L + l] = idx;
            } else if (e.kind == EdgeKind::transition) {
                const bool entering = sg.vertices[e.head].kind == VertexKind::charging;
                auto& table = entering ? g.enter_idx : g.exit_idx;
                table[(static_cast<std::size_t>(e.visit) * (K + 1) + e.k_from) * L + l] = idx;
            }
        }
        sg.edge_end = g.n_edges();
        g.subgraphs.push_back(std::move(sg));
    }

    // Groups: all charging vertices of one visit, across charger types.
    for (int v = 0; v < V; ++v) {
        VisitGroup grp;
        grp.visit = v;
        grp.visit_id = inst.visits[v].id;
        grp.bus = inst.visits[v].bus;
        for (int l = 0; l < L; ++l)
            for (int vx : charge_vertex[static_cast<std::size_t>(v) * L + l]) grp.vertices.push_back({l, vx});
        if (grp.vertices.empty()) continue;
        // I_p by its definition: head inside the group, tail outside.
        std::set<std::pair<int, int>> members;
        for (const auto& r : grp.vertices) members.insert({r.charger, r.vertex});
        for (int e = 0; e < g.n_edges(); ++e) {
            const Edge& ed = g.edges[e];
            if (members.count({ed.charger, ed.head}) && !members.count({ed.charger, ed.tail}))
                grp.entering.push_back(e);
        }
        g.groups.push_back(std::move(grp));
    }
    return g;
}

Eigen::SparseMatrix<int> incidence_matrix(int n_vertices, const std::vector<std::pair<int, int>>& edges) {
    std::vector<Eigen::Triplet<int>> t;
    for (std::size_t i = 0; i < edges.size(); ++i) {
        t.emplace_back(edges[i].first, static_cast<int>(i), 1);
        t.emplace_back(edges[i].second, static_cast<int>(i), -1);
    }
    Eigen::SparseMatrix<int> D(n_vertices, static_cast<int>(edges.size()));
    D.setFromTriplets(t.begin(), t.end());
    return D;
}

Eigen::SparseMatrix<int> incidence_matrix(const ActionGraph& g, int l) {
    const Subgraph& sg = g.subgraphs.at(l);
    std::vector<std::pair<int, int>> es;
    for (int e = sg.edge_begin; e < sg.edge_end; ++e) es.emplace_back(g.edges[e].tail, g.edges[e].head);
    return incidence_matrix(static_cast<int>(sg.vertices.size()), es);
}

std::vector<int> supply_vector(const ActionGraph& g, int l) {
    const Subgraph& sg = g.subgraphs.at(l);
    std::vector<int> f(sg.vertices.size(), 0);
    f.front() = sg.supply;
    f.back() = -sg.supply;
    return f;
}

std::vector<int> close_edges(const ActionGraph& g, const ChargePlan& prev) {
    std::vector<int> out;
    if (prev.empty()) return out;
    const double eps = 1e-9;
    const double p0 = prev.t0_min, p1 = prev.t1_min();
    for (int e = 0; e < g.n_edges(); ++e) {
        const Edge& ed = g.edges[e];
        const double a = g.edge_start(e), b = g.edge_end(e);
        bool close = false;
        switch (ed.kind) {
            case EdgeKind::charge:
                for (const auto& iv : prev.intervals)
                    if (iv.bus == ed.bus && iv.charger == ed.charger &&
                        std::min(b, iv.end_min) - std::max(a, iv.start_min) > eps)
                        close = true;
                break;
            case EdgeKind::transition: {
                const bool entering = g.subgraphs[ed.charger].vertices[ed.head].kind == VertexKind::charging;
                for (const auto& iv : prev.intervals) {
                    if (iv.bus != ed.bus || iv.charger != ed.charger) continue;
                    if (entering && a >= iv.start_min - eps && a < iv.end_min - eps) close = true;
                    if (!entering && a > iv.start_min + eps && a <= iv.end_min + eps) close = true;
                }
                break;
            }
            case EdgeKind::rest: {
                const double lo = std::max(a, p0), hi = std::min(b, p1);
                if (hi - lo > eps && prev.busy_chargers(ed.charger, lo, hi) < g.subgraphs[ed.charger].supply)
                    close = true;
                break;
            }
            case EdgeKind::source:
            case EdgeKind::sink: break;
        }
        if (close) out.push_back(e);
    }
    return out;
}

ActionGraph apply_plan_preference(const ActionGraph& g, const std::vector<int>& close, double bonus) {
    ActionGraph out = g;
    for (int e : close) out.edges.at(e).cost -= bonus;
    return out;
}

std::string graph_csv(const ActionGraph& g) {
    std::ostringstream s;
    s << "edge_id,kind,bus,charger_type,k_from,k_to,capacity,cost\n";
    for (int e = 0; e < g.n_edges(); ++e) {
        const Edge& ed = g.edges[e];
        s << e << ',' << to_string(ed.kind) << ',' << ed.bus << ',' << ed.charger << ',' << ed.k_from << ','
          << ed.k_to << ',' << ed.capacity << ',' << fmt_num(ed.cost) << '\n';
    }
    return s.str();
}

}  // namespace beb
