#include <doctest.h>

#include <Eigen/Dense>
#include <algorithm>
#include <set>

#include "beb/discretize.hpp"
#include "beb/graph.hpp"
#include "beb/milp.hpp"
#include "beb/solver.hpp"
#include "support.hpp"

using namespace beb;
using namespace beb::test;

namespace {

// One bus with a 10-minute stop at one charger type, 5-minute grid.
Scenario one_visit(double dwell = 10.0, int chargers = 1) {
    std::vector<std::string> ids{"c1", "c2"};
    ids.resize(chargers);
    std::vector<ChargerType> cs;
    for (const auto& id : ids) cs.push_back(charger(id, 1, 100, 2));
    return scenario({bus("b", 300, 0.8, {route(0, 10, 30), station(10, 10 + dwell, ids), route(10 + dwell, 40, 30)})},
                    cs, rates(0.1, 0.1, 0, 0), 0, 40);
}

Eigen::MatrixXi dense(const Eigen::SparseMatrix<int>& s) { return Eigen::MatrixXi(s); }

}  // namespace

TEST_CASE("incidence matrix of the four-vertex sample graph") {
    // e1: 1->2, e2: 2->3, e3: 3->2, e4: 3->4, e5: 2->4 (zero-based below).
    const auto D = dense(incidence_matrix(4, {{0, 1}, {1, 2}, {2, 1}, {2, 3}, {1, 3}}));
    Eigen::MatrixXi expect(4, 5);
    expect << 1, 0, 0, 0, 0,
             -1, 1, -1, 0, 1,
              0, -1, 1, 1, 0,
              0, 0, 0, -1, -1;
    CHECK(D == expect);
}

TEST_CASE("a single edge is a (+1, -1) column") {
    const auto D = dense(incidence_matrix(2, {{0, 1}}));
    CHECK(D(0, 0) == 1);
    CHECK(D(1, 0) == -1);
}

TEST_CASE("one visit of two steps: one group whose entering edges are its transitions in") {
    const DiscreteInstance inst = discretize(one_visit(), 5.0);
    const ActionGraph g = build_action_graph(inst);
    REQUIRE(g.groups.size() == 1);
    const auto& grp = g.groups[0];
    // Construction rule: the visit has charging vertices at k=2,3,4 and an
    // entering transition r_k -> c_k for k=2,3.
    std::set<int> expect;
    for (int e = 0; e < g.n_edges(); ++e) {
        const Edge& ed = g.edges[e];
        const auto& vs = g.subgraphs[ed.charger].vertices;
        if (vs[ed.tail].kind == VertexKind::rest && vs[ed.head].kind == VertexKind::charging) expect.insert(e);
    }
    CHECK(expect.size() == 2);
    CHECK(std::set<int>(grp.entering.begin(), grp.entering.end()) == expect);
    for (int e : grp.entering) CHECK(g.edges[e].kind == EdgeKind::transition);
}

TEST_CASE("groups span charger types and I_p is head-inside tail-outside") {
    const ActionGraph g = build_action_graph(discretize(one_visit(15.0, 2), 5.0));
    REQUIRE(g.groups.size() == 1);
    std::set<int> chargers;
    for (const auto& v : g.groups[0].vertices) chargers.insert(v.charger);
    CHECK(chargers.size() == 2);
    std::set<std::pair<int, int>> members;
    for (const auto& v : g.groups[0].vertices) members.insert({v.charger, v.vertex});
    std::set<int> by_enumeration;
    for (int e = 0; e < g.n_edges(); ++e) {
        const Edge& ed = g.edges[e];
        if (members.count({ed.charger, ed.head}) && !members.count({ed.charger, ed.tail})) by_enumeration.insert(e);
    }
    CHECK(std::set<int>(g.groups[0].entering.begin(), g.groups[0].entering.end()) == by_enumeration);
}

TEST_CASE("no visits leaves a pure rest chain") {
    const Scenario sc = scenario({bus("b", 300, 0.8, {route(0, 30, 30)})}, {charger("c", 2, 100, 2)},
                                 rates(0.1, 0.1, 0, 0), 0, 30);
    const ActionGraph g = build_action_graph(discretize(sc, 5.0));
    CHECK(g.groups.empty());
    for (const auto& e : g.edges)
        CHECK((e.kind == EdgeKind::rest || e.kind == EdgeKind::source || e.kind == EdgeKind::sink));
    CHECK(g.n_edges() == 6 + 2);
}

TEST_CASE("structural invariants on random instances") {
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        GeneratorBounds gb;
        gb.day_end = gb.evening_return = 9 * 60;
        const Scenario sc = generate_random_scenario(3, seed, gb);
        const DiscreteInstance inst = discretize(sc, 5.0);
        const ActionGraph g = build_action_graph(inst);
        for (int l = 0; l < g.n_chargers; ++l) {
            const auto D = dense(incidence_matrix(g, l));
            const Subgraph& sg = g.subgraphs[l];
            CHECK(D.cols() == sg.edge_end - sg.edge_begin);
            for (int c = 0; c < D.cols(); ++c) {
                CHECK(D.col(c).sum() == 0);
                CHECK(D.col(c).cwiseAbs().sum() == 2);
            }
            // All-rest flow satisfies D x = f.
            Eigen::VectorXi x = Eigen::VectorXi::Zero(D.cols());
            for (int e = sg.edge_begin; e < sg.edge_end; ++e) {
                const auto kind = g.edges[e].kind;
                if (kind == EdgeKind::rest || kind == EdgeKind::source || kind == EdgeKind::sink)
                    x[e - sg.edge_begin] = sg.supply;
            }
            const auto f = supply_vector(g, l);
            const Eigen::VectorXi Dx = D * x;
            for (int v = 0; v < D.rows(); ++v) CHECK(Dx[v] == f[v]);
            // Capacities: edges into charging vertices carry at most one unit.
            for (int e = sg.edge_begin; e < sg.edge_end; ++e) {
                const Edge& ed = g.edges[e];
                if (sg.vertices[ed.head].kind == VertexKind::charging) CHECK(ed.capacity == 1);
                if (ed.kind == EdgeKind::rest) CHECK(ed.capacity == sg.supply);
            }
        }
        // sigma defined exactly where gamma is 1, and injective.
        std::set<int> seen;
        for (int j = 0; j < inst.n_buses; ++j)
            for (int k = 0; k < inst.n_steps; ++k)
                for (int l = 0; l < inst.n_chargers; ++l) {
                    const int e = g.charge_edge(j, k, l);
                    CHECK((e >= 0) == inst.available(j, k, l));
                    if (e >= 0) CHECK(seen.insert(e).second);
                }
    }
}

namespace {

ChargePlan plan_on(double t0, double delta, int steps, int buses, int chargers) {
    ChargePlan p;
    p.t0_min = t0;
    p.delta_min = delta;
    p.n_steps = steps;
    p.n_buses = buses;
    p.n_chargers = chargers;
    p.gains.assign(static_cast<std::size_t>(buses) * steps * chargers, 0.0);
    return p;
}

}  // namespace

TEST_CASE("close edges") {
    const ActionGraph g = build_action_graph(discretize(one_visit(), 5.0));

    SUBCASE("a plan with no intervals matches only rest edges") {
        const auto close = close_edges(g, plan_on(0, 5, 8, 1, 1));
        CHECK_FALSE(close.empty());
        for (int e : close) CHECK(g.edges[e].kind == EdgeKind::rest);
        CHECK(close_edges(g, ChargePlan{}).empty());
    }
    SUBCASE("charging over [10, 20) returns both charge edges") {
        ChargePlan p = plan_on(0, 5, 8, 1, 1);
        p.intervals.push_back({0, 0, 0, 2, 4, 10.0, 20.0, 1.0});
        const auto close = close_edges(g, p);
        std::set<int> s(close.begin(), close.end());
        CHECK(s.count(g.charge_edge(0, 2, 0)));
        CHECK(s.count(g.charge_edge(0, 3, 0)));
    }
    SUBCASE("a shifted previous horizon matches by overlap only") {
        // Previous horizon covered [-5, 35) on the same grid and charged [5, 20).
        ChargePlan p = plan_on(-5, 5, 8, 1, 1);
        p.intervals.push_back({0, 0, 0, 2, 5, 5.0, 20.0, 1.0});
        const auto close = close_edges(g, p);
        const std::set<int> got(close.begin(), close.end());
        for (int e = 0; e < g.n_edges(); ++e) {
            const Edge& ed = g.edges[e];
            const double a = g.edge_start(e), b = g.edge_end(e);
            if (ed.kind == EdgeKind::charge) {
                const bool overlap = std::min(b, 20.0) - std::max(a, 5.0) > 0;
                CHECK(got.count(e) == (overlap ? 1u : 0u));
            } else if (ed.kind == EdgeKind::rest) {
                // Only one charger: rest is "close" where the previous plan left it idle inside its span.
                const bool in_span = std::min(b, 35.0) - std::max(a, -5.0) > 0;
                const bool idle = std::min(b, 20.0) - std::max(a, 5.0) <= 0;
                CHECK(got.count(e) == (in_span && idle ? 1u : 0u));
            }
        }
    }
}

TEST_CASE("plan preference subtracts the bonus on exactly the close set") {
    const ActionGraph g = build_action_graph(discretize(one_visit(), 5.0));
    const std::vector<int> close{1, 3};
    const ActionGraph zero = apply_plan_preference(g, close, 0.0);
    const ActionGraph pref = apply_plan_preference(g, close, 0.25);
    for (int e = 0; e < g.n_edges(); ++e) {
        CHECK(zero.edges[e].cost == g.edges[e].cost);
        const double expect = (e == 1 || e == 3) ? -0.25 : 0.0;
        CHECK(pref.edges[e].cost - g.edges[e].cost == expect);
    }
    CHECK(g.edges[1].cost == 0.0);  // original untouched
}

TEST_CASE("the bonus breaks a tie between identical charger types") {
    // Two identical chargers; the bus must charge to end where it started.
    const Scenario sc = scenario({bus("b", 300, 0.8, {route(0, 20, 60), station(20, 40, {"c1", "c2"})})},
                                 {charger("c1", 1, 100, 2), charger("c2", 1, 100, 2)}, rates(0.1, 0.1, 0, 0), 0, 40);
    const DiscreteInstance inst = discretize(sc, 5.0);
    const ActionGraph g = build_action_graph(inst);
    for (int want = 0; want < 2; ++want) {
        std::vector<int> close;
        for (int e = 0; e < g.n_edges(); ++e)
            if (g.edges[e].kind != EdgeKind::rest && g.edges[e].kind != EdgeKind::source &&
                g.edges[e].kind != EdgeKind::sink && g.edges[e].charger == want)
                close.push_back(e);
        ModelOptions o;
        o.linear_profile = true;
        const MilpModel m = build_static_model(apply_plan_preference(g, close, 1e-3), inst, sc.rates, o);
        const auto sol = solver::branch_and_bound(m, {});
        REQUIRE(sol.status == solver::MilpStatus::optimal);
        const ChargePlan p = extract_plan(m, sol.x);
        REQUIRE_FALSE(p.intervals.empty());
        for (const auto& iv : p.intervals) CHECK(iv.charger == want);
    }
}

TEST_CASE("graph CSV header and row count") {
    const ActionGraph g = build_action_graph(discretize(one_visit(), 5.0));
    const std::string csv = graph_csv(g);
    CHECK(csv.rfind("edge_id,kind,bus,charger_type,k_from,k_to,capacity,cost\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == g.n_edges() + 1);
}
