#include "beb/sim/report.hpp"

#include <cstdio>
#include <json.hpp>
#include <sstream>

#include "beb/trajectory.hpp"

namespace beb {

namespace {

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

}  // namespace

std::string trajectory_csv(const ExecutedTrajectory& tr, const std::vector<std::string>& bus_ids,
                           const std::vector<std::string>& charger_ids) {
    std::ostringstream os;
    os << "t_min,bus,soc_kwh,charging_type,gain_kwh\n";
    for (int i = 0; i <= tr.n_steps; ++i)
        for (int j = 0; j < tr.n_buses; ++j) {
            const bool last = i == tr.n_steps;
            const std::size_t at = static_cast<std::size_t>(i) * tr.n_buses + j;
            const int l = last ? -1 : tr.charger[at];
            os << num(tr.time(i)) << ',' << (j < static_cast<int>(bus_ids.size()) ? bus_ids[j] : std::to_string(j))
               << ',' << num(tr.soc_at(i, j)) << ','
               << (l >= 0 && l < static_cast<int>(charger_ids.size()) ? charger_ids[l] : std::string()) << ','
               << num(last ? 0.0 : tr.gain[at]) << '\n';
        }
    return os.str();
}

namespace sim {

std::string mc_runs_csv(const MCReport& rep) {
    std::ostringstream os;
    os << "seed,strategy,consumption,baseline,tou,utility,violation_steps,worst_violation_kwh,fallbacks,failed\n";
    for (const auto& r : rep.runs) {
        os << r.seed << ',' << to_string(r.strategy) << ',' << num(r.cost.consumption) << ',' << num(r.cost.baseline)
           << ',' << num(r.cost.tou) << ',' << num(r.cost.utility()) << ',' << r.traj.violation_steps << ','
           << num(r.traj.worst_violation) << ',' << r.traj.fallbacks << ',' << (r.traj.failed ? 1 : 0) << '\n';
    }
    return os.str();
}

std::string mc_trace_csv(const MCReport& rep) {
    std::ostringstream os;
    os << "t,mean_soc,sigma3_lo,sigma3_hi\n";
    for (std::size_t i = 0; i < rep.mean_soc.size(); ++i) {
        const double m = rep.mean_soc[i], s = rep.sigma3[i];
        os << num(rep.t0_min + static_cast<double>(i) * rep.dt_min) << ',' << num(m) << ',' << num(m - s) << ','
           << num(m + s) << '\n';
    }
    return os.str();
}

namespace {

nlohmann::ordered_json summary(const MCReport& rep) {
    nlohmann::ordered_json j;
    j["strategy"] = std::string(to_string(rep.strategy));
    j["runs"] = rep.runs.size();
    j["mean_cost"] = rep.mean_cost;
    double lo = 0.0, hi = 0.0;
    for (std::size_t i = 0; i < rep.runs.size(); ++i) {
        const double c = rep.runs[i].cost.utility();
        lo = i == 0 ? c : std::min(lo, c);
        hi = i == 0 ? c : std::max(hi, c);
    }
    j["min_cost"] = lo;
    j["max_cost"] = hi;
    j["violation_rate"] = rep.violation_rate;
    j["runs_with_violation"] = rep.runs_with_violation;
    j["failed_runs"] = rep.failed_runs;
    j["terminal_sigma3_kwh"] = rep.terminal_sigma3();
    j["mean_final_kwh"] = rep.mean_final_kwh;
    return j;
}

}  // namespace

std::string mc_summary_json(const std::vector<MCReport>& reports) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& r : reports) arr.push_back(summary(r));
    return arr.dump(2) + "\n";
}

std::string multi_day_json(const std::vector<DayReport>& days) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& d : days) {
        nlohmann::ordered_json j;
        j["day"] = d.day;
        j["initial_kwh"] = d.initial_kwh;
        j["plan_feasible"] = d.plan_feasible;
        j["plan_status"] = d.plan_status;
        j["nominal_cost"] = d.nominal_cost;
        if (d.plan_feasible) j["mc"] = summary(d.mc);
        arr.push_back(std::move(j));
    }
    return arr.dump(2) + "\n";
}

}  // namespace sim
}  // namespace beb
