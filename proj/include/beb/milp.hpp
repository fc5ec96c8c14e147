#pragma once

#include <map>
#include <memory>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "beb/discretize.hpp"
#include "beb/graph.hpp"
#include "beb/plan.hpp"
#include "beb/scenario.hpp"

namespace beb {

enum class Relation { le, eq, ge };

enum class VarRole { x, s, g, e, p, p_max, p_max_tou, err, soft };

enum class RowFamily {
    flow,
    group,
    dynamics,
    gain_cc,
    gain_cv,
    gain_bigm,
    gain_nonneg,
    gain_fixed,
    energy,
    avg_power,
    p_max,
    p_max_tou,
    soc_initial,
    soc_final,
    soft_min,
    terminal,
    lock,
    other,
};

std::string_view to_string(RowFamily f);
std::string_view to_string(VarRole r);

struct Variable {
    std::string name;
    double lb = 0.0;
    double ub = 0.0;
    bool integer = false;
    double obj = 0.0;
    VarRole role = VarRole::x;
    int j = -1, k = -1, l = -1;
};

struct Constraint {
    std::string name;
    std::vector<int> idx;
    std::vector<double> coef;
    Relation rel = Relation::le;
    double rhs = 0.0;
    RowFamily family = RowFamily::other;
};

struct ModelOptions {
    /// g = b_bar_cc * x in place of the CC bound (the CV and big-M rows stay);
    /// the final SOC row becomes a lower bound.
    bool fixed_rate = false;
    /// Drop the CV bound, i.e. treat eta as beyond every reachable SOC.
    bool linear_profile = false;
    /// Fraction of capacity added to min_soc and removed from max_soc.
    double soc_buffer = 0.05;
    bool final_soc_equality = true;
    /// Per-bus starting charge (kWh); empty means the scenario's initial SOC.
    std::vector<double> initial_kwh;
    /// Realized step energies before t0 on the model grid, oldest first.
    std::vector<double> history_energy;
    double p_max_floor = 0.0;
    double p_max_tou_floor = 0.0;
    /// Penalized slack below the buffered minimum SOC ($ per kWh short).
    bool soft_min_soc = false;
    double soft_penalty = 0.0;
};

/// A mixed-integer model min c'x s.t. rows, bounds, integrality. Variable i
/// for i < graph->n_edges() is the flow on edge i.
struct MilpModel {
    std::vector<Variable> vars;
    std::vector<Constraint> rows;
    double obj_offset = 0.0;

    std::shared_ptr<const DiscreteInstance> inst;
    std::shared_ptr<const ActionGraph> graph;
    RateSchedule rates;
    ModelOptions options;

    std::vector<int> s_idx;  // [j*(K+1) + k]
    std::vector<int> g_idx;  // [(j*K + k)*L + l] or -1
    std::vector<int> e_idx;  // [k]
    std::vector<int> p_idx;  // [k], k = 1..K; p_idx[0] = -1
    int p_max_idx = -1;
    int p_max_tou_idx = -1;
    std::vector<int> err_idx;   // [j] or empty
    std::vector<int> soft_idx;  // [j] or empty
    double terminal_weight = 0.0;

    int n_vars() const { return static_cast<int>(vars.size()); }
    int n_rows() const { return static_cast<int>(rows.size()); }
    int add_var(Variable v);
    int add_row(Constraint c);
    int find_var(const std::string& name) const;
    double objective(const std::vector<double>& x) const;
    /// Window length m and trailing fraction for the demand rows.
    std::pair<int, double> window() const;
};

MilpModel build_static_model(const ActionGraph& graph, const DiscreteInstance& inst, const RateSchedule& rates,
                             const ModelOptions& options = {});

/// Adds err_j >= |s_{j,K} - target_j| and weight * sum err_j to the objective.
void add_terminal_cost(MilpModel& model, const std::vector<double>& target_kwh, double weight);

/// Forbids entering flow into visits already charged. `connected` lists
/// (visit id, charger type) pairs plugged in at t0; their k = 0 entry stays open
/// so the ongoing charge may continue. Throws on ids outside the horizon.
void lock_charged_visits(MilpModel& model, const std::set<int>& charged_visit_ids,
                         const std::set<std::pair<int, int>>& connected = {});

struct FamilyResidual {
    std::string family;
    double max_violation = 0.0;
    std::string worst;  // row or variable name
};

struct ResidualReport {
    std::vector<FamilyResidual> families;  // rows by family, then "bounds", "integrality"
    double worst = 0.0;
    std::string worst_name;
    bool pass = false;
    std::string summary() const;
};

ResidualReport validate_solution(const MilpModel& model, const std::vector<double>& x, double tol = 1e-6);

/// Throws ValidationError (with the worst residual) if `x` is not feasible.
ChargePlan extract_plan(const MilpModel& model, const std::vector<double>& x);

std::string export_lp(const MilpModel& model);

/// Minimal reader for the subset export_lp writes.
struct LpDocument {
    std::vector<std::string> var_names;
    std::vector<double> obj, lb, ub;
    std::vector<bool> integer;
    double obj_offset = 0.0;
    struct Row {
        std::string name;
        std::vector<std::pair<int, double>> terms;
        Relation rel;
        double rhs;
    };
    std::vector<Row> rows;
};
LpDocument read_lp(const std::string& text);

/// JSON summary of a plan (cost breakdown and intervals).
std::string plan_summary_json(const ChargePlan& plan, const std::vector<std::string>& bus_ids,
                              const std::vector<std::string>& charger_ids);

}  // namespace beb
