#include <doctest.h>

#include <cmath>

#include "beb/discretize.hpp"
#include "beb/errors.hpp"
#include "beb/scenario.hpp"
#include "support.hpp"

using namespace beb;

namespace {

const char* kExampleDoc = R"(day_start: 05:00
day_end: 08:00
charger_types:
  - {id: c1, count: 1, p_cc_kw: 300, alpha_per_h: 2, location: station_a}
rates:
  c_offpeak: 0.026216
  c_onpeak: 0.051577
  c_b: 4.81
  c_tou: 13.92
  demand_window_min: 15
  peak_windows:
    - [06:00, 09:00]
buses:
  - id: b1
    capacity_kwh: 300
    eta: 0.8
    initial_soc: 0.7
    final_soc: 0.7
    min_soc: 0.15
    max_soc: 0.95
    schedule:
      - {kind: on_route, start: 05:00, end: 06:00, power_kw: 30}
      - {kind: in_station, start: 06:00, end: 06:10, chargers: [c1]}
      - {kind: on_route, start: 06:10, end: 08:00, power_kw: 30}
)";

}  // namespace

TEST_CASE("a bus stopping at a station at 6 AM for 10 minutes") {
    const Scenario sc = load_scenario(kExampleDoc);
    REQUIRE(sc.buses.size() == 1);
    int stations = 0;
    for (const auto& b : sc.buses[0].schedule)
        if (b.kind == BlockKind::in_station) {
            ++stations;
            CHECK(b.start_min == 360.0);
            CHECK(b.end_min == 370.0);
            REQUIRE(b.chargers.size() == 1);
            CHECK(b.chargers[0] == "c1");
        }
    CHECK(stations == 1);
}

TEST_CASE("validation rejects degenerate documents") {
    SUBCASE("no buses") {
        std::string doc = kExampleDoc;
        doc = doc.substr(0, doc.find("buses:")) + "buses: []\n";
        CHECK_THROWS_WITH_AS(load_scenario(doc), "no buses", ValidationError);
    }
    SUBCASE("overlapping blocks name the bus and both blocks") {
        std::string doc = kExampleDoc;
        const std::string from = "start: 06:10, end: 08:00";
        doc.replace(doc.find(from), from.size(), "start: 06:05, end: 08:00");
        try {
            load_scenario(doc);
            FAIL("expected a validation error");
        } catch (const ValidationError& e) {
            const std::string what = e.what();
            CHECK(what.find("b1") != std::string::npos);
            CHECK(what.find("blocks 1 and 2") != std::string::npos);
        }
    }
    SUBCASE("malformed YAML reports a location") {
        CHECK_THROWS_AS(load_scenario("buses: [\n"), ParseError);
    }
    SUBCASE("unknown charger id") {
        std::string doc = kExampleDoc;
        doc.replace(doc.find("chargers: [c1]"), 14, "chargers: [zz]");
        CHECK_THROWS_AS(load_scenario(doc), ValidationError);
    }
}

TEST_CASE("documents round-trip through to_yaml") {
    const Scenario a = load_scenario(kExampleDoc);
    const std::string text = to_yaml(a);
    const Scenario b = load_scenario(text);
    CHECK(to_yaml(b) == text);
}

TEST_CASE("consumption rate honours half-open peak windows") {
    const RateSchedule r = schedule8_rates();
    CHECK(consumption_rate_at(r, 7 * 60) == doctest::Approx(0.051577));
    CHECK(consumption_rate_at(r, 12 * 60) == doctest::Approx(0.026216));
    CHECK(consumption_rate_at(r, 9 * 60) == doctest::Approx(0.026216));
    CHECK(consumption_rate_at(r, 6 * 60) == doctest::Approx(0.051577));
    CHECK(consumption_rate_at(r, 18 * 60) == doctest::Approx(0.051577));
    CHECK(consumption_rate_at(r, 22 * 60) == doctest::Approx(0.026216));
}

TEST_CASE("random scenarios stay inside the generator bounds") {
    const Scenario sc = generate_random_scenario(30, 7);
    CHECK(sc.buses.size() == 30);
    for (const auto& b : sc.buses)
        for (const auto& blk : b.schedule) {
            const double len = blk.end_min - blk.start_min;
            if (blk.kind == BlockKind::on_route) {
                CHECK(len >= 45.0);
                CHECK(len <= 150.0);
                CHECK(blk.route_power_kw >= 28.0);
                CHECK(blk.route_power_kw <= 36.0);
            } else if (blk.kind == BlockKind::in_station) {
                CHECK(len >= 20.0);
                CHECK(len <= 45.0);
            }
        }
}

TEST_CASE("generation is a pure function of its inputs") {
    CHECK(to_yaml(generate_random_scenario(5, 99)) == to_yaml(generate_random_scenario(5, 99)));
    CHECK(to_yaml(generate_random_scenario(5, 99)) != to_yaml(generate_random_scenario(5, 100)));
}

TEST_CASE("collapsed ranges give exactly alternating blocks") {
    GeneratorBounds g;
    g.route_min_lo = g.route_min_hi = 60;
    g.dwell_min_lo = g.dwell_min_hi = 30;
    const Scenario sc = generate_random_scenario(1, 1, g);
    REQUIRE(sc.buses.size() == 1);
    BlockKind expect = BlockKind::on_route;
    for (const auto& blk : sc.buses[0].schedule) {
        if (blk.kind == BlockKind::at_depot) continue;
        CHECK(blk.kind == expect);
        CHECK(blk.end_min - blk.start_min == (expect == BlockKind::on_route ? 60.0 : 30.0));
        expect = expect == BlockKind::on_route ? BlockKind::in_station : BlockKind::on_route;
    }
    CHECK_THROWS_AS(generate_random_scenario(0, 1), ValidationError);
}

TEST_CASE("discretize marks the two 5-minute steps of the 06:00 stop") {
    const DiscreteInstance inst = discretize(load_scenario(kExampleDoc), 5.0);
    REQUIRE(inst.n_steps == 36);
    std::vector<int> ks = inst.steps_for(0, 0);
    REQUIRE(ks.size() == 2);
    CHECK(inst.time(ks[0]) == 360.0);
    CHECK(inst.time(ks[1]) == 365.0);
    // 30 kW for 5 minutes.
    CHECK(inst.discharge_at(0, 0) == doctest::Approx(2.5));
    CHECK(inst.discharge_at(0, ks[0]) == 0.0);
}

TEST_CASE("a bus never in a station has no availability") {
    using namespace beb::test;
    const Scenario sc = scenario({bus("a", 300, 0.8, {route(300, 400, 30)}), bus("b", 300, 0.8, {station(300, 400, {"c"})})},
                                 {charger("c", 1, 100, 2)}, rates(0.1, 0.1, 0, 0), 300, 400);
    const DiscreteInstance inst = discretize(sc, 5.0);
    for (int k = 0; k < inst.n_steps; ++k) CHECK_FALSE(inst.available(0, k, 0));
    CHECK(inst.steps_for(0, 0).empty());
    CHECK(inst.steps_for(1, 0).size() == 20);
}

TEST_CASE("discharge sums to route energy and availability stays inside station blocks") {
    const Scenario sc = generate_random_scenario(6, 3);
    for (double delta : {3.0, 4.0, 5.0, 7.0}) {
        const DiscreteInstance inst = discretize(sc, delta);
        for (int j = 0; j < inst.n_buses; ++j) {
            double route_kwh = 0.0;
            for (const auto& b : sc.buses[j].schedule) {
                if (b.kind != BlockKind::on_route) continue;
                const double a = std::max(b.start_min, inst.t0_min), e = std::min(b.end_min, inst.t1_min());
                if (e > a) route_kwh += b.route_power_kw * (e - a) / 60.0;
            }
            double d = 0.0;
            for (int k = 0; k < inst.n_steps; ++k) d += inst.discharge_at(j, k);
            CHECK(d == doctest::Approx(route_kwh).epsilon(1e-9));
            for (int k = 0; k < inst.n_steps; ++k)
                for (int l = 0; l < inst.n_chargers; ++l) {
                    if (!inst.available(j, k, l)) continue;
                    bool inside = false;
                    for (const auto& b : sc.buses[j].schedule)
                        if (b.kind == BlockKind::in_station && b.start_min <= inst.time(k) + 1e-9 &&
                            inst.time(k + 1) <= b.end_min + 1e-9)
                            for (const auto& id : b.chargers) inside = inside || id == sc.charger_types[l].id;
                    CHECK(inside);
                }
        }
    }
}

TEST_CASE("load profile CSV") {
    const auto rows = parse_load_profile_csv("time,kwh_per_step\n05:00,1.5\n05:15,2\n");
    REQUIRE(rows.size() == 2);
    CHECK(rows[1].time_min == 315.0);
    CHECK(rows[1].kwh_per_step == 2.0);
    CHECK_THROWS_AS(parse_load_profile_csv("time,kwh_per_step\n05:00\n"), ParseError);
}
