#pragma once

#include <vector>

#include "beb/plan.hpp"
#include "beb/scenario.hpp"

namespace beb::sim {

/// Energy drawn per step on a uniform grid t_k = t0 + k*delta.
struct EnergySeries {
    double t0_min = 0.0;
    double delta_min = 5.0;
    std::vector<double> bus;   // kWh into buses over step k
    std::vector<double> load;  // uncontrolled kWh over step k (may be empty)
    std::vector<double> history;  // total kWh of the steps before t0, oldest first
};

struct Bill {
    CostBreakdown cost;
    std::vector<double> p_window;  // [k], k = 0..K; average kW over the window ending at t_k (p_window[0] = 0)
    double p_max = 0.0;
    double p_max_tou = 0.0;
};

/// Utility bill of a realized series: consumption on bus energy, baseline
/// demand on the largest moving-window average, TOU demand on windows ending
/// in a peak step. The window average integrates the piecewise-constant power
/// over the trailing demand window, so a window that does not divide the grid
/// picks up the straddling step in proportion. Steps before t0 come from
/// `history` or count as zero.
Bill billing_oracle(const EnergySeries& series, const RateSchedule& rates);

/// Sums a fine series into bins of `factor` steps (a trailing partial bin is kept).
std::vector<double> rebin(const std::vector<double>& fine, int factor);

}  // namespace beb::sim
