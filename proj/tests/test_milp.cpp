#include <doctest.h>

#include <cmath>
#include <map>

#include "beb/errors.hpp"
#include "beb/milp.hpp"
#include "beb/solver.hpp"
#include "model_util.hpp"
#include "support.hpp"

using namespace beb;
using namespace beb::test;

namespace {

int count_family(const MilpModel& m, RowFamily f) {
    int n = 0;
    for (const auto& r : m.rows) n += r.family == f;
    return n;
}

// Bus at the station for the first two steps, then on route.
Scenario three_steps() {
    return scenario({bus("b", 300, 0.8, {station(0, 10, {"c"}), route(10, 15, 60)}, 0.7, 0.7)},
                    {charger("c", 1, 100, 2)}, rates(0.1, 0.2, 1.0, 2.0), 0, 15);
}

// Bus must make up a route's energy at one of two visits; TOU in the middle.
Scenario small_day(double c_tou = 2.0) {
    return scenario({bus("b", 300, 0.8,
                         {route(0, 20, 60), station(20, 40, {"c"}), route(40, 60, 60), station(60, 90, {"c"})})},
                    {charger("c", 1, 100, 2)}, rates(0.05, 0.15, 1.0, c_tou, {{30, 60}}), 0, 90);
}

solver::MilpSolution solve(const MilpModel& m) { return solver::branch_and_bound(m, {}); }

}  // namespace

TEST_CASE("variable and row counts of a three-step, one-visit instance") {
    const Built b = build(three_steps(), 5.0);
    const MilpModel& m = b.model;
    // Vertices: source, (c_k, r_k) for k=0..2, r_3, sink = 9. Edges: source,
    // 3 rest, sink, 2 transitions in, 2 charge, 2 transitions out = 11.
    CHECK(b.graph->n_edges() == 11);
    // x 11 + s 4 + g 2 + e 3 + p 3 + p_max + p_max_tou.
    CHECK(m.n_vars() == 25);
    CHECK(count_family(m, RowFamily::flow) == 9);
    CHECK(count_family(m, RowFamily::group) == 1);
    CHECK(count_family(m, RowFamily::dynamics) == 3);
    CHECK(count_family(m, RowFamily::gain_cc) == 2);
    CHECK(count_family(m, RowFamily::gain_cv) == 2);
    CHECK(count_family(m, RowFamily::gain_bigm) == 2);
    CHECK(count_family(m, RowFamily::gain_nonneg) == 2);
    CHECK(count_family(m, RowFamily::energy) == 3);
    CHECK(count_family(m, RowFamily::avg_power) == 3);
    CHECK(count_family(m, RowFamily::p_max) == 3);
    CHECK(count_family(m, RowFamily::p_max_tou) == 0);
    CHECK(count_family(m, RowFamily::soc_initial) == 1);
    CHECK(count_family(m, RowFamily::soc_final) == 1);
    CHECK(m.n_rows() == 32);
    // Big-M is the capacity.
    for (const auto& r : m.rows)
        if (r.family == RowFamily::gain_bigm) CHECK(r.coef[1] == -300.0);
}

TEST_CASE("demand window rows") {
    SUBCASE("delta divides the window: three terms of 1/Delta") {
        const Built b = build(small_day(), 5.0);
        CHECK(b.model.window() == std::make_pair(3, 0.0));
        for (const auto& row : b.model.rows) {
            if (row.family != RowFamily::avg_power || row.name != "avg_5") continue;
            REQUIRE(row.idx.size() == 4);
            for (std::size_t t = 1; t < 4; ++t) CHECK(row.coef[t] == doctest::Approx(-4.0));
        }
    }
    SUBCASE("delta = 4 adds a trailing three-quarter term on e_{k-4}") {
        const Built b = build(small_day(), 4.0);
        const auto [mw, frac] = b.model.window();
        CHECK(mw == 3);
        CHECK(frac == doctest::Approx(0.75));
        bool seen = false;
        for (const auto& row : b.model.rows) {
            if (row.family != RowFamily::avg_power || row.name != "avg_6") continue;
            seen = true;
            std::map<int, double> w;
            for (std::size_t t = 1; t < row.idx.size(); ++t) w[b.model.vars[row.idx[t]].k] = -row.coef[t];
            CHECK(w.size() == 4);
            for (int k : {3, 4, 5}) CHECK(w[k] == doctest::Approx(4.0));
            CHECK(w[2] == doctest::Approx(3.0));
        }
        CHECK(seen);
    }
}

TEST_CASE("terminal cost") {
    ModelOptions o;
    o.final_soc_equality = false;
    const Built base = build(small_day(), 5.0, o);
    const double s_end = base.model.vars[base.model.s_idx.back()].lb;
    const std::vector<double> target{s_end + 40.0};

    SUBCASE("weight zero leaves the optimum alone") {
        Built with = base;
        add_terminal_cost(with.model, target, 0.0);
        CHECK(solve(with.model).objective == doctest::Approx(solve(base.model).objective).epsilon(1e-7));
    }
    SUBCASE("err equals the absolute deviation at the optimum") {
        Built with = base;
        add_terminal_cost(with.model, target, 0.5);
        const auto sol = solve(with.model);
        REQUIRE(sol.has_solution());
        const double sT = sol.x[with.model.s_idx.back()];
        CHECK(sol.x[with.model.err_idx[0]] == doctest::Approx(std::abs(sT - target[0])).epsilon(1e-7));
    }
    SUBCASE("a heavier weight never increases the deviation") {
        double prev = INFINITY;
        for (double w : {0.01, 0.1, 1.0, 10.0}) {
            Built with = base;
            add_terminal_cost(with.model, target, w);
            const auto sol = solve(with.model);
            REQUIRE(sol.has_solution());
            const double dev = std::abs(sol.x[with.model.s_idx.back()] - target[0]);
            CHECK(dev <= prev + 1e-7);
            prev = dev;
        }
    }
    Built twice = base;
    add_terminal_cost(twice.model, target, 1.0);
    CHECK_THROWS_AS(add_terminal_cost(twice.model, target, 1.0), ValidationError);
}

TEST_CASE("visit locks") {
    ModelOptions o;
    o.final_soc_equality = false;
    const Built base = build(three_steps(), 5.0, o);
    const int vid = base.graph->groups[0].visit_id;

    SUBCASE("no locks, no rows") {
        Built b = base;
        lock_charged_visits(b.model, {});
        CHECK(b.model.n_rows() == base.model.n_rows());
    }
    SUBCASE("every visit locked: gains are zero") {
        Built b = base;
        lock_charged_visits(b.model, {vid});
        const auto sol = solve(b.model);
        REQUIRE(sol.has_solution());
        for (int gi : b.model.g_idx)
            if (gi >= 0) CHECK(sol.x[gi] == doctest::Approx(0.0));
    }
    SUBCASE("a connected bus may continue but not re-enter") {
        Built b = base;
        lock_charged_visits(b.model, {vid}, {{vid, 0}});
        const ActionGraph& g = *b.graph;
        const int in0 = g.enter_edge(0, 0, 0), in1 = g.enter_edge(0, 1, 0);
        REQUIRE(in0 >= 0);
        REQUIRE(in1 >= 0);
        // Enumerate the binaries of the visit and keep the lock-feasible ones.
        std::vector<int> bin;
        for (int e = 0; e < g.n_edges(); ++e)
            if (g.edges[e].capacity == 1) bin.push_back(e);
        bool some_continue = false;
        for (unsigned mask = 0; mask < (1u << bin.size()); ++mask) {
            std::vector<double> x(b.model.n_vars(), 0.0);
            for (std::size_t t = 0; t < bin.size(); ++t) x[bin[t]] = (mask >> t) & 1u;
            bool ok = true;
            for (const auto& r : b.model.rows) {
                if (r.family != RowFamily::lock) continue;
                double a = 0.0;
                for (std::size_t t = 0; t < r.idx.size(); ++t) a += r.coef[t] * x[r.idx[t]];
                ok = ok && a <= r.rhs + 1e-9;
            }
            if (!ok) continue;
            CHECK(x[in1] == 0.0);
            some_continue = some_continue || x[in0] == 1.0;
        }
        CHECK(some_continue);
    }
    Built b = base;
    CHECK_THROWS_AS(lock_charged_visits(b.model, {12345}), ValidationError);
}

TEST_CASE("plan extraction") {
    SUBCASE("all rest: no intervals, load-only demand, no consumption") {
        const Scenario sc = scenario({bus("b", 300, 0.8, {route(0, 30, 30), station(30, 60, {"c"})}, 0.7, 0.7)},
                                     {charger("c", 1, 100, 2)}, rates(0.1, 0.2, 3.0, 5.0, {{0, 30}}), 0, 60);
        ModelOptions o;
        o.final_soc_equality = false;
        Scenario with_load = sc;
        with_load.load_profile = {{0, 2.0}, {30, 4.0}};
        const Built b = build(with_load, 5.0, o);
        const auto x = all_rest(b.model);
        REQUIRE(validate_solution(b.model, x).pass);
        const ChargePlan p = extract_plan(b.model, x);
        CHECK(p.intervals.empty());
        CHECK(p.cost.consumption == 0.0);
        // 2 kWh per 30-minute profile step is 4 kW, then 8 kW after 00:30.
        CHECK(p.cost.baseline == doctest::Approx(3.0 * 8.0));
        CHECK(p.cost.tou == doctest::Approx(5.0 * 4.0));
    }
    SUBCASE("consecutive charge edges merge into one interval") {
        const Built b = build(small_day(), 5.0);
        const auto sol = solve(b.model);
        REQUIRE(sol.has_solution());
        const ChargePlan p = extract_plan(b.model, sol.x);
        REQUIRE(p.intervals.size() == 1);
        const auto& iv = p.intervals[0];
        int steps = 0;
        for (int k = 0; k < p.n_steps; ++k) steps += sol.x[b.graph->charge_edge(0, k, 0)] > 0.5;
        CHECK(iv.k_end - iv.k_begin == steps);
        CHECK(p.cost.total() == doctest::Approx(sol.objective).epsilon(1e-9));
    }
    SUBCASE("infeasible assignments are rejected with the worst residual") {
        const Built b = build(small_day(), 5.0);
        std::vector<double> x(b.model.n_vars(), 0.0);
        CHECK_THROWS_AS(extract_plan(b.model, x), ValidationError);
    }
}

TEST_CASE("validation reports the offending family") {
    const Built b = build(small_day(), 5.0);
    auto sol = solve(b.model);
    REQUIRE(sol.has_solution());
    CHECK(validate_solution(b.model, sol.x).pass);

    auto x = sol.x;
    const int e = b.graph->charge_edge(0, 5, 0);
    x[e] = 2.0;
    const auto rep = validate_solution(b.model, x);
    CHECK_FALSE(rep.pass);
    bool bounds = false;
    for (const auto& f : rep.families) bounds = bounds || (f.family == "bounds" && f.max_violation == doctest::Approx(1.0));
    CHECK(bounds);

    // Push one positive gain past its CC bound by eps.
    x = sol.x;
    int gi = -1;
    for (int i : b.model.g_idx)
        if (i >= 0 && sol.x[i] > 1.0) gi = i;
    REQUIRE(gi >= 0);
    const double eps = 1e-3;
    x[gi] = b.model.vars[gi].ub + eps;
    const auto rep2 = validate_solution(b.model, x);
    CHECK_FALSE(rep2.pass);
    double cc = 0.0;
    for (const auto& f : rep2.families)
        if (f.family == "gain_cc") cc = f.max_violation;
    CHECK(cc == doctest::Approx(eps));
}

TEST_CASE("all-rest is feasible when discharge alone keeps SOC in bounds") {
    ModelOptions o;
    o.final_soc_equality = false;
    const Built b = build(small_day(), 5.0, o);
    CHECK(validate_solution(b.model, all_rest(b.model)).pass);
}

TEST_CASE("restriction orderings") {
    SUBCASE("variable rate never costs more than fixed rate") {
        for (double d : {3.0, 5.0}) {
            ModelOptions fixed;
            fixed.fixed_rate = true;
            const auto var = solve(build(small_day(), d).model);
            const auto fix = solve(build(small_day(), d, fixed).model);
            if (!fix.has_solution()) continue;
            REQUIRE(var.has_solution());
            CHECK(var.objective <= fix.objective + 1e-6);
        }
    }
    SUBCASE("a TOU demand term never lowers the optimum") {
        const auto without = solve(build(small_day(0.0), 5.0).model);
        const auto with = solve(build(small_day(2.0), 5.0).model);
        CHECK(with.objective >= without.objective - 1e-7);
    }
    SUBCASE("no availability: SOC follows the discharge recursion") {
        const Scenario sc = scenario({bus("b", 300, 0.8, {route(0, 30, 30), depot(30, 60)}, 0.7, 0.6)},
                                     {charger("c", 1, 100, 2)}, rates(0.1, 0.1, 1, 0), 0, 60);
        ModelOptions o;
        o.final_soc_equality = false;
        const Built b = build(sc, 5.0, o);
        const auto sol = solve(b.model);
        REQUIRE(sol.has_solution());
        double s = 210.0;
        for (int k = 0; k <= b.inst->n_steps; ++k) {
            CHECK(sol.x[b.model.s_idx[k]] == doctest::Approx(s));
            if (k < b.inst->n_steps) s -= b.inst->discharge_at(0, k);
        }
    }
}

TEST_CASE("LP export") {
    const Built b = build(three_steps(), 5.0);
    const std::string text = export_lp(b.model);
    CHECK(text.find("Minimize") != std::string::npos);
    CHECK(text.find("Subject To") != std::string::npos);
    CHECK(text.find("Bounds") != std::string::npos);
    CHECK(text.find("Generals") != std::string::npos);

    SUBCASE("round trip through the reader") {
        const LpDocument doc = read_lp(text);
        const MilpModel& m = b.model;
        REQUIRE(doc.var_names.size() == static_cast<std::size_t>(m.n_vars()));
        REQUIRE(doc.rows.size() == static_cast<std::size_t>(m.n_rows()));
        for (int i = 0; i < m.n_vars(); ++i) {
            CHECK(doc.var_names[i] == m.vars[i].name);
            CHECK(doc.obj[i] == m.vars[i].obj);
            CHECK(doc.lb[i] == m.vars[i].lb);
            CHECK(doc.ub[i] == m.vars[i].ub);
            CHECK(doc.integer[i] == m.vars[i].integer);
        }
        for (int r = 0; r < m.n_rows(); ++r) {
            const auto& a = m.rows[r];
            const auto& d = doc.rows[r];
            CHECK(d.name == a.name);
            CHECK(d.rel == a.rel);
            CHECK(d.rhs == a.rhs);
            std::map<int, double> want, got;
            for (std::size_t t = 0; t < a.idx.size(); ++t) want[a.idx[t]] += a.coef[t];
            for (auto [i, c] : d.terms) got[i] += c;
            std::erase_if(want, [](const auto& kv) { return kv.second == 0.0; });
            CHECK(got == want);
        }
    }
    SUBCASE("an empty model is objective-only") {
        MilpModel empty;
        const std::string t = export_lp(empty);
        CHECK(t.find("Minimize") != std::string::npos);
        CHECK(read_lp(t).rows.empty());
    }
}

TEST_CASE("LP export golden") {
    MilpModel m;
    m.add_var({"x_0", 0.0, 1.0, true, 2.5, VarRole::x, -1, -1, -1});
    m.add_var({"s_0_1", 10.0, 90.0, false, 0.0, VarRole::s, 0, 1, -1});
    m.add_var({"p_max", 0.0, 0.0, false, -4.0, VarRole::p_max, -1, -1, -1});
    m.add_row({"r1", {0, 1}, {1.0, -0.5}, Relation::le, 3.0, RowFamily::other});
    m.add_row({"r2", {1}, {1.0}, Relation::eq, 12.0, RowFamily::other});
    const std::string expect =
        "\\ bebsched model: 3 variables, 2 constraints\n"
        "Minimize\n"
        " obj: + 2.5 x_0 - 4 p_max\n"
        "Subject To\n"
        " r1: + 1 x_0 - 0.5 s_0_1 <= 3\n"
        " r2: + 1 s_0_1 = 12\n"
        "Bounds\n"
        " 0 <= x_0 <= 1\n"
        " 10 <= s_0_1 <= 90\n"
        " p_max = 0\n"
        "Generals\n"
        " x_0\n"
        "End\n";
    CHECK(export_lp(m) == expect);
}
