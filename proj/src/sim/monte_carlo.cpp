#include "beb/sim/monte_carlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include "beb/rng.hpp"

namespace beb::sim {

std::uint64_t run_seed(std::uint64_t base_seed, int i) { return derive_seed(base_seed, static_cast<std::uint64_t>(i)); }

MCReport reduce_runs(Strategy strategy, std::vector<SimRun> runs) {
    std::sort(runs.begin(), runs.end(), [](const SimRun& a, const SimRun& b) { return a.seed < b.seed; });
    MCReport rep;
    rep.strategy = strategy;
    if (runs.empty()) return rep;
    const ExecutedTrajectory& first = runs.front().traj;
    const int J = first.n_buses;
    const int T = first.n_steps + 1;
    const double R = static_cast<double>(runs.size());
    rep.t0_min = first.t0_min;
    rep.dt_min = first.dt_min;

    long bad = 0, total = 0;
    for (const auto& r : runs) {
        rep.mean_cost += r.cost.utility();
        bad += r.traj.violation_steps;
        total += static_cast<long>(r.traj.n_steps) * J;
        if (r.traj.violated()) ++rep.runs_with_violation;
        if (r.traj.failed) ++rep.failed_runs;
    }
    rep.mean_cost /= R;
    rep.violation_rate = total > 0 ? static_cast<double>(bad) / total : 0.0;

    rep.mean_soc.assign(T, 0.0);
    rep.sigma3.assign(T, 0.0);
    std::vector<double> bus_mean(J);
    for (int i = 0; i < T; ++i) {
        for (int j = 0; j < J; ++j) {
            double s = 0.0;
            for (const auto& r : runs) s += r.traj.soc_at(i, j);
            bus_mean[j] = s / R;
            rep.mean_soc[i] += bus_mean[j];
        }
        rep.mean_soc[i] /= J;
        double var = 0.0;
        for (const auto& r : runs)
            for (int j = 0; j < J; ++j) {
                const double d = r.traj.soc_at(i, j) - bus_mean[j];
                var += d * d;
            }
        rep.sigma3[i] = 3.0 * std::sqrt(var / (R * J));
        if (i == T - 1) rep.mean_final_kwh = bus_mean;
    }
    rep.runs = std::move(runs);
    return rep;
}

MCReport monte_carlo(const Scenario& sc, const ChargePlan& reference, Strategy strategy, const MCOptions& opt) {
    const int n = std::max(1, opt.n_runs);
    std::vector<SimRun> runs(n);
    std::atomic<int> next{0};
    auto worker = [&] {
        for (int i = next++; i < n; i = next++) runs[i] = simulate(sc, reference, strategy, opt.sim, run_seed(opt.base_seed, i));
    };
    const int jobs = std::clamp(opt.jobs, 1, n);
    std::vector<std::thread> pool;
    for (int t = 1; t < jobs; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    return reduce_runs(strategy, std::move(runs));
}

std::vector<DayReport> multi_day(const Scenario& scenario, Strategy strategy, int n_days, const MCOptions& opt,
                                 const DayPlanOptions& plan_opt) {
    std::vector<DayReport> out;
    Scenario sc = scenario;
    std::vector<double> carry;
    for (int d = 0; d < n_days; ++d) {
        DayReport day;
        day.day = d + 1;
        if (!carry.empty())
            for (std::size_t j = 0; j < sc.buses.size(); ++j) sc.buses[j].initial_soc = carry[j] / sc.buses[j].capacity_kwh;
        for (const auto& b : sc.buses) day.initial_kwh.push_back(b.initial_soc * b.capacity_kwh);

        DayPlanOptions po = plan_opt;
        po.model.initial_kwh.clear();
        const DayPlanResult ref = plan_day(sc, po);
        day.plan_status = std::string(solver::to_string(ref.solution.status));
        day.plan_feasible = ref.feasible();
        if (!day.plan_feasible) {
            out.push_back(std::move(day));
            break;
        }
        day.nominal_cost = ref.plan.cost.utility();
        MCOptions o = opt;
        // Day one keeps the base seed so a single day matches monte_carlo.
        if (d > 0) o.base_seed = derive_seed(opt.base_seed, 0x10000u + static_cast<std::uint64_t>(d));
        o.sim.initial_kwh = day.initial_kwh;
        day.mc = monte_carlo(sc, ref.plan, strategy, o);
        carry = day.mc.mean_final_kwh;
        out.push_back(std::move(day));
    }
    return out;
}

}  // namespace beb::sim
