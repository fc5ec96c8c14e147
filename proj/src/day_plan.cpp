#include "beb/day_plan.hpp"

#include "beb/discretize.hpp"
#include "beb/graph.hpp"

namespace beb {

DayPlanResult plan_day(const Scenario& sc, const DayPlanOptions& opt) {
    DayPlanResult r;
    const DiscreteInstance inst = discretize(sc, opt.delta_min);
    const ActionGraph graph = build_action_graph(inst);
    auto model = std::make_shared<MilpModel>(build_static_model(graph, inst, sc.rates, opt.model));
    r.solution = solver::branch_and_bound(*model, opt.limits, nullptr, opt.branch);
    if (r.solution.has_solution()) r.plan = extract_plan(*model, r.solution.x);
    r.model = std::move(model);
    return r;
}

}  // namespace beb
