#pragma once

#include <string>
#include <vector>

#include "beb/sim/monte_carlo.hpp"

namespace beb::sim {

/// `seed,strategy,consumption,baseline,tou,utility,violation_steps,worst_violation_kwh,fallbacks,failed`, one row per run.
std::string mc_runs_csv(const MCReport& rep);

/// `t,mean_soc,sigma3_lo,sigma3_hi` with t in minutes and SOC in kWh.
std::string mc_trace_csv(const MCReport& rep);

/// Aggregate summary of one or more reports.
std::string mc_summary_json(const std::vector<MCReport>& reports);

/// Per-day chain summary.
std::string multi_day_json(const std::vector<DayReport>& days);

}  // namespace beb::sim
