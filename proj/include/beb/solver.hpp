#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "beb/milp.hpp"

namespace beb::solver {

/// min c'x  s.t.  row_lb <= A x <= row_ub,  col_lb <= x <= col_ub. A is CSC.
struct LpProblem {
    int n_cols = 0;
    int n_rows = 0;
    std::vector<double> obj;
    std::vector<double> col_lb, col_ub;
    std::vector<double> row_lb, row_ub;
    std::vector<int> col_start;  // n_cols + 1
    std::vector<int> row_index;
    std::vector<double> value;
    std::vector<std::uint8_t> integer;  // per column, B&B only

    /// Relaxation of `model` without any reformulation.
    static LpProblem from_model(const MilpModel& model);
};

enum class LpStatus { optimal, infeasible, unbounded, iteration_limit, numerical };
std::string_view to_string(LpStatus s);

/// Simplex basis over structurals then one logical per row.
struct Basis {
    std::vector<int> head;             // n_rows basic variable indices
    std::vector<std::uint8_t> status;  // n_cols + n_rows: 0 basic, 1 at lower, 2 at upper
    std::vector<double> weights;       // dual steepest-edge weight per basis position
    bool empty() const { return head.empty(); }
};

struct LpResult {
    LpStatus status = LpStatus::numerical;
    double objective = 0.0;
    std::vector<double> x;         // structurals
    std::vector<double> row_act;   // A x
    std::vector<double> duals;     // per row
    std::vector<double> reduced;   // per structural
    long iterations = 0;
    double primal_residual = 0.0;  // worst bound/row violation
    double dual_residual = 0.0;    // worst reduced-cost sign violation
    Basis basis;
};

struct LpOptions {
    long iteration_limit = 0;  // 0: automatic
    double primal_tol = 1e-9;
    double dual_tol = 1e-9;
    bool perturb = true;
};

/// Bounded dual simplex with dual steepest-edge pricing and a bound-flipping
/// ratio test. Infinite bounds are boxed at +-1e7 internally; an optimum that
/// rests on such a box is reported as unbounded.
class DualSimplex {
public:
    explicit DualSimplex(LpProblem problem, LpOptions options = {});
    ~DualSimplex();
    DualSimplex(const DualSimplex&) = delete;
    DualSimplex& operator=(const DualSimplex&) = delete;

    const LpProblem& problem() const;
    void set_col_bounds(int j, double lb, double ub);
    double col_lb(int j) const;
    double col_ub(int j) const;
    LpResult solve(const Basis* warm = nullptr);

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

/// LP relaxation of a model, in model variable space.
LpResult solve_lp(const MilpModel& model, const LpOptions& options = {});

struct SolveLimits {
    double time_limit_s = 600.0;  // wall-clock safety net
    double gap_tolerance = 1e-4;
    long node_limit = 100000;     // the deterministic stop
};

enum class MilpStatus { optimal, feasible_limit, infeasible, unbounded, limit_no_incumbent };
std::string_view to_string(MilpStatus s);

struct MilpSolution {
    MilpStatus status = MilpStatus::infeasible;
    std::vector<double> x;
    double objective = 0.0;
    double best_bound = 0.0;
    double gap = 0.0;
    long nodes_explored = 0;
    long lp_iterations = 0;
    double wall_time_s = 0.0;
    bool has_solution() const { return status == MilpStatus::optimal || status == MilpStatus::feasible_limit; }
};

struct BranchOptions {
    bool presolve = true;   // bound tightening + big-M coefficient strengthening
    bool dive = true;       // rounding dive at the root when there is no incumbent
    long dive_max_lps = 400;
    /// One line per improvement: time_s,nodes,incumbent,bound,gap
    std::function<void(const std::string&)> log;
};

/// Model rows turned into an LP after singleton-row bound tightening and
/// strengthening of x-indicator coefficients. Feasible integer points are unchanged.
LpProblem presolve(const MilpModel& model);

MilpSolution branch_and_bound(const MilpModel& model, const SolveLimits& limits,
                              const std::vector<double>* incumbent = nullptr, const BranchOptions& options = {});

/// Heuristic incumbent for a horizon model: the previous plan over the overlap,
/// the reference plan for the newly exposed tail, gains from the discrete
/// charge model, then flows. Empty when the result does not validate.
std::vector<double> build_warm_start(const MilpModel& model, const ChargePlan& previous, const ChargePlan& reference);

}  // namespace beb::solver
