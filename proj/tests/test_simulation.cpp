#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "beb/charge_model.hpp"
#include "beb/day_plan.hpp"
#include "beb/rng.hpp"
#include "beb/sim/billing.hpp"
#include "beb/sim/monte_carlo.hpp"
#include "beb/sim/truth.hpp"
#include "support.hpp"

using namespace beb;
using namespace beb::sim;
using namespace beb::test;

namespace {

double stddev(const std::vector<double>& v) {
    const double m = std::accumulate(v.begin(), v.end(), 0.0) / v.size();
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return std::sqrt(s / (v.size() - 1));
}

int charger_at(const ExecutedTrajectory& tr, int i, int j) { return tr.charger[static_cast<std::size_t>(i) * tr.n_buses + j]; }
double gain_at(const ExecutedTrajectory& tr, int i, int j) { return tr.gain[static_cast<std::size_t>(i) * tr.n_buses + j]; }

// Steps at which bus j starts a charging run.
std::vector<int> run_starts(const ExecutedTrajectory& tr, int j) {
    std::vector<int> out;
    for (int i = 0; i < tr.n_steps; ++i)
        if (charger_at(tr, i, j) >= 0 && (i == 0 || charger_at(tr, i - 1, j) < 0)) out.push_back(i);
    return out;
}

const Scenario& desk() {
    static const Scenario sc = load_scenario_file(data_path("desk4.yaml"));
    return sc;
}

const DayPlanResult& desk_plan() {
    static const DayPlanResult r = plan_day(desk(), {});
    return r;
}

SimConfig zero_cfg() {
    SimConfig c;
    c.noise = NoiseParams::zero();
    return c;
}

SimConfig field_noise_cfg() {
    SimConfig c;
    c.noise = NoiseParams::paper();
    return c;
}

}  // namespace

TEST_CASE("noise sampling") {
    SUBCASE("zero parameters give zero noise") {
        const RunNoise n = sample_run_noise(NoiseParams::zero(), desk(), 5, 10);
        for (double b : n.bias_d) CHECK(b == 0.0);
        for (double b : n.bias_c) CHECK(b == 0.0);
        for (double a : n.arrival_s) CHECK(a == 0.0);
        const Scenario p = perturb_arrivals(desk(), n.arrival_s);
        for (std::size_t j = 0; j < p.buses.size(); ++j)
            for (std::size_t b = 0; b < p.buses[j].schedule.size(); ++b) {
                CHECK(p.buses[j].schedule[b].start_min == desk().buses[j].schedule[b].start_min);
                CHECK(p.buses[j].schedule[b].end_min == desk().buses[j].schedule[b].end_min);
            }
    }
    SUBCASE("field magnitudes") {
        const NoiseParams p = NoiseParams::paper();
        CHECK(p.sigma_a_s == 120.0);
        CHECK(p.sigma_beta_c(ChargerClass::slow) == 1.2);
        CHECK(p.sigma_beta_c(ChargerClass::fast) == 2.4);
        CHECK(p.sigma_beta_d == 1.2);
    }
    SUBCASE("bias spread matches its sigma over 1e5 draws") {
        const NoiseParams p = NoiseParams::paper();
        std::vector<double> bd, bslow, bfast;
        for (std::uint64_t seed = 0; bd.size() < 100000; ++seed) {
            const RunNoise n = sample_run_noise(p, desk(), seed, 0);
            bd.insert(bd.end(), n.bias_d.begin(), n.bias_d.end());
            for (std::size_t l = 0; l < n.bias_c.size(); ++l)
                (desk().charger_types[l].noise_class == ChargerClass::fast ? bfast : bslow).push_back(n.bias_c[l]);
        }
        CHECK(std::abs(stddev(bd) / 1.2 - 1.0) < 0.02);
        CHECK(std::abs(stddev(bslow) / 1.2 - 1.0) < 0.02);
        CHECK(std::abs(stddev(bfast) / 2.4 - 1.0) < 0.02);
    }
    SUBCASE("same seed, same draws; streams differ across seeds") {
        const RunNoise a = sample_run_noise(NoiseParams::paper(), desk(), 9, 50);
        const RunNoise b = sample_run_noise(NoiseParams::paper(), desk(), 9, 50);
        const RunNoise c = sample_run_noise(NoiseParams::paper(), desk(), 10, 50);
        CHECK(a.z_d == b.z_d);
        CHECK(a.arrival_s == b.arrival_s);
        CHECK(a.z_d != c.z_d);
    }
}

TEST_CASE("truth steps") {
    CHECK(truth_discharge_step(100, 3, 0, 0, 0, 60, 200) == 97.0);
    // Bias is kW integrated over the step.
    CHECK(truth_discharge_step(100, 0, 1.2, 0, 0, 300, 200) - 100 == doctest::Approx(0.1).epsilon(1e-12));
    CHECK(truth_discharge_step(1, 50, 0, 0, 0, 60, 200) == 0.0);
    CHECK(truth_charge_step(195, 50, true, 0, 0, 0, 60, 200) == 200.0);
    // An idle charger adds no bias or noise.
    CHECK(truth_charge_step(100, 0, false, 2.4, 0.08, 3.0, 60, 200) == 100.0);

    SUBCASE("white noise scales with the root of the step") {
        Rng r(3);
        std::vector<double> d;
        for (int i = 0; i < 100000; ++i) d.push_back(truth_discharge_step(100, 0, 0, 0.05, r.normal(), 300, 200) - 100);
        CHECK(std::abs(stddev(d) / (0.05 * std::sqrt(300.0)) - 1.0) < 0.02);
    }
    SUBCASE("commanded gain is capped by CC-CV") {
        const Scenario sc = scenario({bus("b", 200, 0.8, {station(0, 30, {"c"})}, 0.78, 0.78, 0.1, 1.0)},
                                     {charger("c", 1, 300, 3)}, rates(0.1, 0.1, 0, 0), 0, 30);
        TruthEnvironment env(sc, NoiseParams::zero(), 1);
        const double s0 = env.soc()[0];
        env.advance({BusCommand{0, 1e6, INFINITY}}, 1.0);
        const auto cp = continuous_params(300, 3, 0.8, 200);
        CHECK(env.soc()[0] == doctest::Approx(simulate_exact_clamped(s0, 1.0 / 60.0, cp)).epsilon(1e-12));
        CHECK(env.soc()[0] - s0 < 300.0 / 60.0);  // below the CC line: already in CV
    }
    SUBCASE("SOC stays within [0, E] under heavy noise") {
        NoiseParams big = NoiseParams::paper();
        big.sigma_nu_d = 5;
        big.sigma_nu_c_slow = big.sigma_nu_c_fast = 5;
        SimConfig c = field_noise_cfg();
        c.noise = big;
        const SimRun run = simulate(desk(), desk_plan().plan, Strategy::qin, c, 4);
        for (int i = 0; i <= run.traj.n_steps; ++i)
            for (int j = 0; j < run.traj.n_buses; ++j) {
                CHECK(run.traj.soc_at(i, j) >= 0.0);
                CHECK(run.traj.soc_at(i, j) <= desk().buses[j].capacity_kwh);
            }
    }
}

TEST_CASE("arrival perturbation") {
    const Scenario sc = scenario({bus("b", 200, 0.8, {route(0, 20, 30), station(20, 30, {"c"}), route(30, 60, 30)})},
                                 {charger("c", 1, 100, 2)}, rates(0.1, 0.1, 0, 0), 0, 60);
    const int vid = visit_ids(sc)[0][1];
    REQUIRE(vid >= 0);
    std::vector<double> late(vid + 1, 0.0);
    late[vid] = 120.0;
    const Scenario p = perturb_arrivals(sc, late);
    const auto& st = p.buses[0].schedule[1];
    CHECK(st.start_min == doctest::Approx(22.0));
    CHECK(st.end_min == 30.0);
    // The route absorbs the delay but keeps its energy.
    const auto& r = p.buses[0].schedule[0];
    CHECK(r.end_min == doctest::Approx(22.0));
    CHECK(r.route_power_kw * (r.end_min - r.start_min) == doctest::Approx(30.0 * 20.0));

    std::vector<double> early(vid + 1, 0.0);
    early[vid] = -3600.0;
    CHECK(perturb_arrivals(sc, early).buses[0].schedule[1].start_min == doctest::Approx(0.0).epsilon(1e-5));
    std::vector<double> very_late(vid + 1, 0.0);
    very_late[vid] = 3600.0;
    CHECK(perturb_arrivals(sc, very_late).buses[0].schedule[1].start_min == doctest::Approx(30.0));
}

TEST_CASE("thresholding strategy") {
    SUBCASE("above the threshold: never charges") {
        const Scenario sc = scenario({bus("b", 200, 0.9, {station(0, 60, {"c"})}, 0.71, 0.71)},
                                     {charger("c", 1, 100, 2)}, rates(0.1, 0.1, 0, 0), 0, 60);
        TruthEnvironment env(sc, NoiseParams::zero(), 1);
        const auto tr = run_qin(sc, 0.7, env);
        CHECK(run_starts(tr, 0).empty());
    }
    SUBCASE("low SOC with a long dwell: fills to max and stops") {
        const Scenario sc = scenario({bus("b", 200, 0.9, {station(0, 120, {"c"})}, 0.5, 0.5, 0.15, 0.8)},
                                     {charger("c", 1, 100, 2)}, rates(0.1, 0.1, 0, 0), 0, 120);
        TruthEnvironment env(sc, NoiseParams::zero(), 1);
        const auto tr = run_qin(sc, 0.7, env);
        CHECK(run_starts(tr, 0) == std::vector<int>{0});
        CHECK(tr.soc_at(tr.n_steps, 0) == doctest::Approx(160.0));
        CHECK(charger_at(tr, tr.n_steps - 1, 0) == -1);
    }
    SUBCASE("two buses, one charger: second waits its turn") {
        // 30 kWh at 60 kW to reach max: bus 0 holds the charger for 30 minutes.
        const Scenario sc = scenario({bus("a", 100, 0.95, {station(0, 90, {"c"})}, 0.5, 0.5, 0.15, 0.8),
                                      bus("b", 100, 0.95, {station(0, 90, {"c"})}, 0.5, 0.5, 0.15, 0.8)},
                                     {charger("c", 1, 60, 2)}, rates(0.1, 0.1, 0, 0), 0, 90);
        TruthEnvironment env(sc, NoiseParams::zero(), 1);
        const auto tr = run_qin(sc, 0.7, env);
        CHECK(run_starts(tr, 0) == std::vector<int>{0});
        const auto b = run_starts(tr, 1);
        REQUIRE(b.size() == 1);
        CHECK(b[0] >= 30);
        CHECK(b[0] <= 31);
        for (int i = 0; i < tr.n_steps; ++i) CHECK_FALSE((charger_at(tr, i, 0) >= 0 && charger_at(tr, i, 1) >= 0));
        CHECK(tr.soc_at(tr.n_steps, 1) == doctest::Approx(80.0));
    }
    SUBCASE("fastest free type first") {
        const Scenario sc = scenario({bus("b", 200, 0.9, {station(0, 30, {"s", "f"})}, 0.3, 0.3)},
                                     {charger("s", 1, 50, 2), charger("f", 1, 200, 2)}, rates(0.1, 0.1, 0, 0), 0, 30);
        TruthEnvironment env(sc, NoiseParams::zero(), 1);
        const auto tr = run_qin(sc, 0.7, env);
        CHECK(charger_at(tr, 0, 0) == 1);
    }
    SUBCASE("noisy day: no charge starts at or above the threshold") {
        const SimRun run = simulate(desk(), desk_plan().plan, Strategy::qin, field_noise_cfg(), 8);
        for (int j = 0; j < run.traj.n_buses; ++j)
            for (int i : run_starts(run.traj, j))
                CHECK(run.traj.soc_at(i, j) < 0.7 * desk().buses[j].capacity_kwh);
    }
}

TEST_CASE("open-loop strategy") {
    const ChargePlan& ref = desk_plan().plan;
    SUBCASE("zero noise reproduces the reference gains and bill") {
        const SimRun run = simulate(desk(), ref, Strategy::open_loop, zero_cfg(), 1);
        const int factor = static_cast<int>(ref.delta_min / run.traj.dt_min);
        for (int j = 0; j < ref.n_buses; ++j)
            for (int k = 0; k < ref.n_steps; ++k) {
                double planned = 0.0, got = 0.0;
                for (int l = 0; l < ref.n_chargers; ++l) planned += ref.gain(j, k, l);
                for (int i = k * factor; i < (k + 1) * factor; ++i) got += gain_at(run.traj, i, j);
                CHECK(got == doctest::Approx(planned).epsilon(1e-9));
            }
        CHECK(run.cost.utility() == doctest::Approx(ref.cost.utility()).epsilon(1e-6));
    }
    SUBCASE("noisy day: charges only inside reference intervals") {
        const SimRun run = simulate(desk(), ref, Strategy::open_loop, field_noise_cfg(), 8);
        for (int i = 0; i < run.traj.n_steps; ++i)
            for (int j = 0; j < run.traj.n_buses; ++j)
                if (charger_at(run.traj, i, j) >= 0) {
                    const ChargeInterval* iv = ref.interval_at(j, run.traj.time(i) + 0.5 * run.traj.dt_min);
                    REQUIRE(iv != nullptr);
                    CHECK(iv->charger == charger_at(run.traj, i, j));
                }
    }
    SUBCASE("late arrival cuts the front of the interval") {
        // 45 kWh to recover needs all six 5-minute steps of the visit.
        const Scenario nominal = scenario({bus("b", 200, 0.9, {route(0, 10, 60), station(10, 40, {"c"}), route(40, 60, 105)},
                                               0.7, 0.7, 0.15, 0.95)},
                                          {charger("c", 1, 100, 2)}, rates(0.1, 0.1, 0, 0), 0, 60);
        const DayPlanResult plan = plan_day(nominal, {});
        REQUIRE(plan.solution.has_solution());
        REQUIRE(plan.plan.intervals.size() == 1);
        const ChargeInterval iv = plan.plan.intervals[0];
        REQUIRE(iv.start_min == 10.0);
        const int vid = visit_ids(nominal)[0][1];
        std::vector<double> arrivals(vid + 1, 0.0);
        arrivals[vid] = 120.0;
        TruthEnvironment env(perturb_arrivals(nominal, arrivals), NoiseParams::zero(), 1);
        const auto tr = run_open_loop(plan.plan, env);
        const auto starts = run_starts(tr, 0);
        REQUIRE(starts.size() == 1);
        CHECK(tr.time(starts[0]) == doctest::Approx(12.0));
        for (int i = 0; i < tr.n_steps; ++i)
            if (charger_at(tr, i, 0) >= 0) CHECK(tr.time(i) < iv.end_min);
    }
    SUBCASE("no plan, no charge") {
        TruthEnvironment env(desk(), NoiseParams::zero(), 1);
        const auto tr = run_open_loop(ChargePlan{}, env);
        for (int j = 0; j < tr.n_buses; ++j) CHECK(run_starts(tr, j).empty());
    }
}

TEST_CASE("billing oracle") {
    SUBCASE("constant power") {
        EnergySeries s;
        s.delta_min = 5;
        s.bus.assign(48, 5.0);  // 60 kW
        const Bill b = billing_oracle(s, rates(0.1, 0.2, 10, 0, {}, 15));
        CHECK(b.p_max == doctest::Approx(60.0));
        CHECK(b.p_window[1] == doctest::Approx(20.0));  // first window is mostly before t0
        CHECK(b.cost.consumption == doctest::Approx(0.1 * 240));
        CHECK(b.cost.baseline == doctest::Approx(600.0));
    }
    SUBCASE("peak windows without energy bill no TOU demand") {
        EnergySeries s;
        s.delta_min = 5;
        s.bus.assign(24, 0.0);
        for (int k = 0; k < 6; ++k) s.bus[k] = 4.0;
        const Bill b = billing_oracle(s, rates(0.1, 0.2, 1, 7, {{90, 120}}, 15));
        CHECK(b.p_max_tou == 0.0);
        CHECK(b.cost.tou == 0.0);
        CHECK(b.p_max == doctest::Approx(48.0));
    }
    SUBCASE("window not dividing the step picks up the straddling step") {
        EnergySeries s;
        s.delta_min = 4;
        s.bus = {1, 2, 3, 4, 5, 6};
        const Bill b = billing_oracle(s, rates(0.1, 0.1, 1, 0, {}, 15));
        // Window ending at t=24: steps 5,4,3 whole plus 3/4 of step 2.
        CHECK(b.p_window[6] == doctest::Approx((6 + 5 + 4 + 0.75 * 3) / 0.25));
        CHECK(b.p_window[2] == doctest::Approx((1 + 2) / 0.25));
    }
    SUBCASE("history fills windows before the series") {
        EnergySeries s;
        s.delta_min = 5;
        s.bus = {1};
        s.history = {9, 2, 3};
        const Bill b = billing_oracle(s, rates(0.1, 0.1, 1, 0, {}, 15));
        CHECK(b.p_window[1] == doctest::Approx((1 + 3 + 2) / 0.25));
    }
    CHECK(rebin({1, 2, 3, 4, 5}, 2) == std::vector<double>{3, 7, 5});
}

TEST_CASE("billing oracle agrees with the model's own demand rows") {
    for (double delta : {5.0, 4.0}) {
        CAPTURE(delta);
        Scenario sc = scenario({bus("a", 200, 0.9, {route(0, 40, 60), station(40, 80, {"c"}), route(80, 120, 70)}, 0.6, 0.6),
                                bus("b", 200, 0.9, {station(0, 30, {"c"}), route(30, 90, 60), station(90, 120, {"c"})}, 0.6, 0.6)},
                               {charger("c", 1, 150, 2)}, rates(0.05, 0.15, 4, 6, {{40, 80}}, 15), 0, 120);
        sc.load_profile = {{0, 3}, {30, 7}, {60, 2}, {90, 5}};
        DayPlanOptions o;
        o.delta_min = delta;
        const DayPlanResult r = plan_day(sc, o);
        REQUIRE(r.solution.has_solution());
        const ChargePlan& p = r.plan;
        EnergySeries s;
        s.t0_min = p.t0_min;
        s.delta_min = p.delta_min;
        s.bus = p.bus_energy;
        s.load = p.load_energy;
        const Bill b = billing_oracle(s, sc.rates);
        for (int k = 1; k <= p.n_steps; ++k) CHECK(b.p_window[k] == doctest::Approx(p.p_avg[k]).epsilon(1e-9));
        CHECK(b.p_max == doctest::Approx(p.p_max).epsilon(1e-9));
        CHECK(b.p_max_tou == doctest::Approx(p.p_max_tou).epsilon(1e-9));
        CHECK(b.cost.utility() == doctest::Approx(p.cost.utility()).epsilon(1e-9));
    }
}

TEST_CASE("strategy names") {
    for (Strategy s : {Strategy::qin, Strategy::open_loop, Strategy::hierarchical}) CHECK(parse_strategy(to_string(s)) == s);
    CHECK_THROWS(parse_strategy("greedy"));
}

TEST_CASE("Monte-Carlo reduction") {
    const ChargePlan& ref = desk_plan().plan;
    SUBCASE("one zero-noise run has no dispersion") {
        MCOptions o;
        o.n_runs = 1;
        o.sim = zero_cfg();
        const MCReport r = monte_carlo(desk(), ref, Strategy::open_loop, o);
        for (double s : r.sigma3) CHECK(s == 0.0);
        CHECK(r.runs.size() == 1);
        CHECK(r.mean_cost == doctest::Approx(ref.cost.utility()).epsilon(1e-6));
    }
    MCOptions o;
    o.n_runs = 6;
    o.base_seed = 77;
    o.sim = field_noise_cfg();
    const MCReport a = monte_carlo(desk(), ref, Strategy::open_loop, o);
    SUBCASE("seeded and independent of worker count") {
        o.jobs = 3;
        const MCReport b = monte_carlo(desk(), ref, Strategy::open_loop, o);
        CHECK(a.mean_cost == b.mean_cost);
        CHECK(a.sigma3 == b.sigma3);
        CHECK(a.mean_soc == b.mean_soc);
        std::vector<std::uint64_t> seeds;
        for (int i = 0; i < o.n_runs; ++i) seeds.push_back(run_seed(77, i));
        std::sort(seeds.begin(), seeds.end());
        for (std::size_t i = 0; i < a.runs.size(); ++i) {
            CHECK(a.runs[i].seed == seeds[i]);
            CHECK(a.runs[i].traj.soc == b.runs[i].traj.soc);
        }
    }
    SUBCASE("statistics do not depend on run order") {
        std::vector<SimRun> shuffled = a.runs;
        std::reverse(shuffled.begin(), shuffled.end());
        std::rotate(shuffled.begin(), shuffled.begin() + 2, shuffled.end());
        const MCReport b = reduce_runs(Strategy::open_loop, shuffled);
        CHECK(a.mean_cost == b.mean_cost);
        CHECK(a.sigma3 == b.sigma3);
        CHECK(a.violation_rate == b.violation_rate);
    }
    SUBCASE("dispersion by hand") {
        const int J = a.runs[0].traj.n_buses, n = static_cast<int>(a.runs.size());
        const int last = a.runs[0].traj.n_steps;
        double sq = 0.0;
        for (int j = 0; j < J; ++j) {
            double m = 0.0;
            for (const auto& r : a.runs) m += r.traj.soc_at(last, j);
            m /= n;
            for (const auto& r : a.runs) sq += std::pow(r.traj.soc_at(last, j) - m, 2);
        }
        CHECK(a.terminal_sigma3() == doctest::Approx(3.0 * std::sqrt(sq / (n * J))));
    }
    SUBCASE("a single day matches the plain runner") {
        const auto days = multi_day(desk(), Strategy::open_loop, 1, o, {});
        REQUIRE(days.size() == 1);
        CHECK(days[0].mc.mean_cost == a.mean_cost);
        CHECK(days[0].mc.sigma3 == a.sigma3);
    }
}

TEST_CASE("zero-noise days repeat") {
    MCOptions o;
    o.n_runs = 1;
    o.sim = zero_cfg();
    const auto days = multi_day(desk(), Strategy::open_loop, 2, o, {});
    REQUIRE(days.size() == 2);
    CHECK(days[1].plan_feasible);
    for (std::size_t j = 0; j < desk().buses.size(); ++j)
        CHECK(days[1].initial_kwh[j] == doctest::Approx(days[0].initial_kwh[j]).epsilon(1e-6));
    CHECK(days[1].nominal_cost == doctest::Approx(days[0].nominal_cost).epsilon(1e-6));
}
