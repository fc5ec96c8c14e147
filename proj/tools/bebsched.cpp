// Command-line front end: scenario generation, day planning, closed-loop
// simulation and Monte-Carlo studies.

#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include "beb/day_plan.hpp"
#include "beb/errors.hpp"
#include "beb/milp.hpp"
#include "beb/scenario.hpp"
#include "beb/sim/monte_carlo.hpp"
#include "beb/sim/report.hpp"

namespace fs = std::filesystem;
using namespace beb;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitInfeasible = 3;
constexpr int kExitLimit = 4;

struct Common {
    std::string scenario;
    std::string out_dir = ".";
    double delta = 5.0;
    double time_limit = 600.0;
    double gap = 1e-4;
    long node_limit = 20000;
    bool fixed_rate = false;
};

void write_file(const fs::path& p, const std::string& text) {
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    std::ofstream f(p, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + p.string());
    f << text;
}

std::vector<std::string> bus_ids(const Scenario& sc) {
    std::vector<std::string> v;
    for (const auto& b : sc.buses) v.push_back(b.id);
    return v;
}

std::vector<std::string> charger_ids(const Scenario& sc) {
    std::vector<std::string> v;
    for (const auto& c : sc.charger_types) v.push_back(c.id);
    return v;
}

DayPlanOptions plan_options(const Common& c) {
    DayPlanOptions o;
    o.delta_min = c.delta;
    o.model.fixed_rate = c.fixed_rate;
    o.limits = {c.time_limit, c.gap, c.node_limit};
    return o;
}

// Exit code for a day plan that produced nothing usable, or 0.
int plan_failure(const DayPlanResult& r) {
    if (r.feasible()) return 0;
    std::cerr << "day plan: " << solver::to_string(r.solution.status) << "\n";
    return r.solution.status == solver::MilpStatus::limit_no_incumbent ? kExitLimit : kExitInfeasible;
}

sim::NoiseParams noise_by_name(const std::string& name) {
    return name == "zero" ? sim::NoiseParams::zero() : sim::NoiseParams::paper();
}

void print_cost(const char* label, const CostBreakdown& c) {
    std::printf("%s: consumption %.2f, baseline demand %.2f, TOU demand %.2f, total %.2f\n", label, c.consumption,
                c.baseline, c.tou, c.utility());
}

int cmd_gen(int buses, std::uint64_t seed, const std::string& out) {
    const Scenario sc = generate_random_scenario(buses, seed);
    write_file(out, to_yaml(sc));
    std::printf("%d buses, %zu charger types, day %s-%s -> %s\n", buses, sc.charger_types.size(),
                format_hhmm(sc.day_start_min).c_str(), format_hhmm(sc.day_end_min).c_str(), out.c_str());
    return 0;
}

int cmd_plan(const Common& c, const std::string& lp_path) {
    const Scenario sc = load_scenario_file(c.scenario);
    const DayPlanResult r = plan_day(sc, plan_options(c));
    if (!lp_path.empty()) write_file(lp_path, export_lp(*r.model));
    if (int code = plan_failure(r)) return code;
    const fs::path dir(c.out_dir);
    write_file(dir / "plan.csv", plan_csv(r.plan, bus_ids(sc), charger_ids(sc)));
    write_file(dir / "plan.json", plan_summary_json(r.plan, bus_ids(sc), charger_ids(sc)));
    std::printf("status %s, objective %.6f, gap %.3g, nodes %ld\n",
                std::string(solver::to_string(r.solution.status)).c_str(), r.solution.objective, r.solution.gap,
                r.solution.nodes_explored);
    print_cost("cost", r.plan.cost);
    return 0;
}

int cmd_simulate(const Common& c, const std::string& strategy, std::uint64_t seed, const std::string& noise,
                 const sim::SimConfig& base) {
    const Scenario sc = load_scenario_file(c.scenario);
    const sim::Strategy st = sim::parse_strategy(strategy);
    const DayPlanResult ref = plan_day(sc, plan_options(c));
    if (int code = plan_failure(ref)) return code;
    sim::SimConfig cfg = base;
    cfg.noise = noise_by_name(noise);
    cfg.billing_delta_min = c.delta;
    const sim::SimRun run = sim::simulate(sc, ref.plan, st, cfg, seed);
    write_file(fs::path(c.out_dir) / "trajectory.csv", trajectory_csv(run.traj, bus_ids(sc), charger_ids(sc)));
    print_cost("nominal", ref.plan.cost);
    print_cost("realized", run.cost);
    std::printf("violations %d bus-steps (worst %.3f kWh), fallbacks %d%s\n", run.traj.violation_steps,
                run.traj.worst_violation, run.traj.fallbacks, run.traj.failed ? ", FAILED" : "");
    if (!run.traj.diagnostics.empty()) std::printf("%s\n", run.traj.diagnostics.c_str());
    return 0;
}

int cmd_mc(const Common& c, const std::vector<std::string>& strategies, const std::string& noise,
           const sim::MCOptions& base, int days) {
    const Scenario sc = load_scenario_file(c.scenario);
    sim::MCOptions opt = base;
    opt.sim.noise = noise_by_name(noise);
    opt.sim.billing_delta_min = c.delta;
    const fs::path dir(c.out_dir);

    if (days > 1) {
        int code = 0;
        for (const auto& name : strategies) {
            const sim::Strategy st = sim::parse_strategy(name);
            const auto chain = sim::multi_day(sc, st, days, opt, plan_options(c));
            write_file(dir / ("days_" + name + ".json"), sim::multi_day_json(chain));
            for (const auto& d : chain) {
                if (!d.plan_feasible) {
                    std::printf("%s day %d: nominal plan %s\n", name.c_str(), d.day, d.plan_status.c_str());
                    code = kExitInfeasible;
                } else {
                    std::printf("%s day %d: mean cost %.2f, violation rate %.4f, terminal 3sigma %.3f kWh\n",
                                name.c_str(), d.day, d.mc.mean_cost, d.mc.violation_rate, d.mc.terminal_sigma3());
                }
            }
        }
        return code;
    }

    const DayPlanResult ref = plan_day(sc, plan_options(c));
    if (int code = plan_failure(ref)) return code;
    print_cost("nominal", ref.plan.cost);
    std::vector<sim::MCReport> reports;
    for (const auto& name : strategies) {
        const sim::Strategy st = sim::parse_strategy(name);
        sim::MCReport rep = sim::monte_carlo(sc, ref.plan, st, opt);
        write_file(dir / ("runs_" + name + ".csv"), sim::mc_runs_csv(rep));
        write_file(dir / ("trace_" + name + ".csv"), sim::mc_trace_csv(rep));
        std::printf("%-12s mean cost %10.2f  violation rate %.4f  terminal 3sigma %8.3f kWh\n", name.c_str(),
                    rep.mean_cost, rep.violation_rate, rep.terminal_sigma3());
        reports.push_back(std::move(rep));
    }
    write_file(dir / "summary.json", sim::mc_summary_json(reports));
    return 0;
}

void add_common(CLI::App* app, Common& c, bool needs_scenario = true) {
    if (needs_scenario) app->add_option("scenario", c.scenario, "Scenario YAML")->required()->check(CLI::ExistingFile);
    app->add_option("-o,--out", c.out_dir, "Output directory");
    app->add_option("--delta", c.delta, "Day-plan step (minutes)")->check(CLI::PositiveNumber);
    app->add_option("--time-limit", c.time_limit, "Solver time limit (s)")->check(CLI::PositiveNumber);
    app->add_option("--gap", c.gap, "Relative optimality gap")->check(CLI::NonNegativeNumber);
    app->add_option("--node-limit", c.node_limit, "Branch-and-bound node limit")->check(CLI::PositiveNumber);
}

void add_horizon(CLI::App* app, HorizonConfig& h) {
    app->add_option("--horizon", h.horizon_min, "Receding horizon length (minutes)")->check(CLI::PositiveNumber);
    app->add_option("--delta-rh", h.delta_rh_min, "Receding horizon step (minutes)")->check(CLI::PositiveNumber);
    app->add_option("--terminal-weight", h.terminal_weight, "$ per kWh of terminal SOC error");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Battery-electric bus charge scheduling"};
    app.require_subcommand(1);

    int gen_buses = 4;
    std::uint64_t seed = 1;
    std::string gen_out = "scenario.yaml";
    auto* gen = app.add_subcommand("gen", "Generate a random scenario");
    gen->add_option("--buses", gen_buses, "Number of buses")->check(CLI::Range(1, 1000));
    gen->add_option("--seed", seed, "Random seed");
    gen->add_option("-o,--out", gen_out, "Output file");

    Common common;
    std::string lp_path;
    auto* plan = app.add_subcommand("plan", "Solve the static day plan");
    add_common(plan, common);
    plan->add_flag("--fixed-rate", common.fixed_rate, "Fixed charge rate model");
    plan->add_option("--export-lp", lp_path, "Write the model in LP format");

    std::string strategy = "hierarchical";
    std::string noise = "paper";
    sim::SimConfig sim_cfg;
    auto* simulate = app.add_subcommand("simulate", "One closed-loop run");
    add_common(simulate, common);
    add_horizon(simulate, sim_cfg.horizon);
    simulate->add_option("--strategy", strategy, "qin|open-loop|hierarchical")
        ->check(CLI::IsMember({"qin", "open-loop", "hierarchical"}));
    simulate->add_option("--seed", seed, "Random seed");
    simulate->add_option("--noise", noise, "paper|zero")->check(CLI::IsMember({"paper", "zero"}));

    std::vector<std::string> strategies{"qin", "open-loop", "hierarchical"};
    sim::MCOptions mc_opt;
    int days = 1;
    auto* mc = app.add_subcommand("mc", "Monte-Carlo study");
    add_common(mc, common);
    add_horizon(mc, mc_opt.sim.horizon);
    mc->add_option("--strategy", strategies, "Strategies to run")
        ->check(CLI::IsMember({"qin", "open-loop", "hierarchical"}));
    mc->add_option("--runs", mc_opt.n_runs, "Runs per strategy")->check(CLI::Range(1, 100000));
    mc->add_option("--seed", mc_opt.base_seed, "Base seed");
    mc->add_option("--jobs", mc_opt.jobs, "Worker threads")->check(CLI::Range(1, 1024));
    mc->add_option("--days", days, "Chained days")->check(CLI::Range(1, 365));
    mc->add_option("--noise", noise, "paper|zero")->check(CLI::IsMember({"paper", "zero"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    try {
        if (*gen) return cmd_gen(gen_buses, seed, gen_out);
        if (*plan) return cmd_plan(common, lp_path);
        if (*simulate) {
            sim_cfg.sim_dt_min = 1.0;
            return cmd_simulate(common, strategy, seed, noise, sim_cfg);
        }
        if (*mc) return cmd_mc(common, strategies, noise, mc_opt, days);
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
