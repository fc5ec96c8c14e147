#include <json.hpp>

#include "beb/milp.hpp"

namespace beb {

std::string plan_summary_json(const ChargePlan& plan, const std::vector<std::string>& bus_ids,
                              const std::vector<std::string>& charger_ids) {
    nlohmann::ordered_json j;
    j["t0_min"] = plan.t0_min;
    j["delta_min"] = plan.delta_min;
    j["n_steps"] = plan.n_steps;
    j["objective"] = plan.objective;
    j["cost"] = {{"consumption", plan.cost.consumption},
                 {"baseline_demand", plan.cost.baseline},
                 {"tou_demand", plan.cost.tou},
                 {"other", plan.cost.other},
                 {"utility_total", plan.cost.utility()}};
    j["p_max_kw"] = plan.p_max;
    j["p_max_tou_kw"] = plan.p_max_tou;
    auto& arr = j["intervals"] = nlohmann::ordered_json::array();
    for (const auto& iv : plan.intervals)
        arr.push_back({{"bus", bus_ids.at(iv.bus)},
                       {"charger_type", charger_ids.at(iv.charger)},
                       {"visit", iv.visit_id},
                       {"start_min", iv.start_min},
                       {"end_min", iv.end_min},
                       {"kwh", iv.kwh}});
    return j.dump(2) + "\n";
}

}  // namespace beb
