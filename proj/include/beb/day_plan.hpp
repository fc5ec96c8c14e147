#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "beb/milp.hpp"
#include "beb/scenario.hpp"
#include "beb/solver.hpp"

namespace beb {

struct DayPlanOptions {
    double delta_min = 5.0;
    ModelOptions model;  // soc_buffer defaults to 5%
    solver::SolveLimits limits{600.0, 1e-4, 20000};
    solver::BranchOptions branch;
};

struct DayPlanResult {
    std::shared_ptr<const MilpModel> model;
    solver::MilpSolution solution;
    ChargePlan plan;  // empty unless the solver returned an assignment
    bool feasible() const { return solution.has_solution(); }
};

/// Static whole-day plan: discretize, build graph and model, solve.
DayPlanResult plan_day(const Scenario& scenario, const DayPlanOptions& options = {});

}  // namespace beb
