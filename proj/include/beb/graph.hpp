#pragma once

#include <Eigen/SparseCore>

#include <string>
#include <utility>
#include <vector>

#include "beb/discretize.hpp"
#include "beb/plan.hpp"

namespace beb {

enum class EdgeKind { charge, rest, transition, source, sink };
enum class VertexKind { source, rest, charging, sink };

std::string_view to_string(EdgeKind kind);

struct Vertex {
    VertexKind kind = VertexKind::rest;
    int k = -1;      // time index t_k
    int bus = -1;    // charging vertices only
    int visit = -1;  // index into DiscreteInstance::visits
};

struct Edge {
    int tail = -1;  // local vertex index within the sub-graph
    int head = -1;
    EdgeKind kind = EdgeKind::rest;
    int charger = -1;
    int bus = -1;
    int visit = -1;
    int k_from = -1;
    int k_to = -1;
    int capacity = 0;
    double cost = 0.0;
};

/// Sub-graph of one charger type. Its edges occupy the global range
/// [edge_begin, edge_end) of ActionGraph::edges.
struct Subgraph {
    int charger = -1;
    std::vector<Vertex> vertices;  // source first, sink last
    int edge_begin = 0;
    int edge_end = 0;
    int supply = 0;  // n_{c_l}
    int source() const { return 0; }
    int sink() const { return static_cast<int>(vertices.size()) - 1; }
};

struct VertexRef {
    int charger;
    int vertex;
    bool operator==(const VertexRef&) const = default;
};

/// One bus visit: its vertices across charger types and the edges entering it.
struct VisitGroup {
    int visit = -1;     // index into DiscreteInstance::visits
    int visit_id = -1;  // stable scenario-wide id
    int bus = -1;
    std::vector<VertexRef> vertices;
    std::vector<int> entering;  // global edge indices
};

struct ActionGraph {
    int n_steps = 0;
    int n_buses = 0;
    int n_chargers = 0;
    double t0_min = 0.0;
    double delta_min = 0.0;
    std::vector<Subgraph> subgraphs;
    std::vector<Edge> edges;
    std::vector<VisitGroup> groups;
    std::vector<int> sigma;  // [(j*K + k)*L + l] -> charge edge index or -1
    std::vector<int> enter_idx;  // [(visit*(K+1) + k)*L + l] -> r_k -> c_k edge or -1
    std::vector<int> exit_idx;   // [(visit*(K+1) + k)*L + l] -> c_k -> r_k edge or -1

    int n_edges() const { return static_cast<int>(edges.size()); }
    int charge_edge(int j, int k, int l) const {
        return sigma[(static_cast<std::size_t>(j) * n_steps + k) * n_chargers + l];
    }
    /// Transition r_k -> c_{visit,k} on type l, or -1.
    int enter_edge(int visit, int k, int l) const {
        return enter_idx[(static_cast<std::size_t>(visit) * (n_steps + 1) + k) * n_chargers + l];
    }
    /// Transition c_{visit,k} -> r_k on type l, or -1.
    int exit_edge(int visit, int k, int l) const {
        return exit_idx[(static_cast<std::size_t>(visit) * (n_steps + 1) + k) * n_chargers + l];
    }
    double edge_start(int e) const { return t0_min + edges[e].k_from * delta_min; }
    double edge_end(int e) const { return t0_min + edges[e].k_to * delta_min; }
};

ActionGraph build_action_graph(const DiscreteInstance& inst);

/// D_l: +1 where the edge leaves the vertex, -1 where it enters.
Eigen::SparseMatrix<int> incidence_matrix(const ActionGraph& g, int charger);
Eigen::SparseMatrix<int> incidence_matrix(int n_vertices, const std::vector<std::pair<int, int>>& edges);

/// f_l = (n, 0, ..., 0, -n).
std::vector<int> supply_vector(const ActionGraph& g, int charger);

/// Edges matching `previous` by time overlap: charge edges inside its charge
/// intervals, transitions at its connect/disconnect instants, and rest edges
/// where it left the charger type with spare capacity. Sorted ascending.
std::vector<int> close_edges(const ActionGraph& g, const ChargePlan& previous);

/// Copy of `g` with `bonus` subtracted from the cost of each edge in `close`.
ActionGraph apply_plan_preference(const ActionGraph& g, const std::vector<int>& close, double bonus);

/// CSV `edge_id,kind,bus,charger_type,k_from,k_to,capacity,cost`.
std::string graph_csv(const ActionGraph& g);

}  // namespace beb
