#include "beb/plan.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "beb/format.hpp"

namespace beb {

double ChargePlan::soc_at(int j, double t) const {
    if (n_steps == 0) return 0.0;
    const double x = std::clamp((t - t0_min) / delta_min, 0.0, static_cast<double>(n_steps));
    const int k = std::min(static_cast<int>(std::floor(x)), n_steps - 1);
    const double w = x - k;
    return (1.0 - w) * soc_at_step(j, k) + w * soc_at_step(j, k + 1);
}

int ChargePlan::busy_chargers(int l, double a, double b) const {
    // Count per sub-interval between breakpoints so that sequential use is not double counted.
    std::vector<double> cuts{a, b};
    for (const auto& iv : intervals) {
        if (iv.charger != l) continue;
        if (iv.start_min > a && iv.start_min < b) cuts.push_back(iv.start_min);
        if (iv.end_min > a && iv.end_min < b) cuts.push_back(iv.end_min);
    }
    std::sort(cuts.begin(), cuts.end());
    int best = 0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        if (cuts[i + 1] <= cuts[i]) continue;
        const double mid = 0.5 * (cuts[i] + cuts[i + 1]);
        int n = 0;
        for (const auto& iv : intervals)
            if (iv.charger == l && iv.start_min <= mid && mid < iv.end_min) ++n;
        best = std::max(best, n);
    }
    return best;
}

const ChargeInterval* ChargePlan::interval_at(int j, double t) const {
    for (const auto& iv : intervals)
        if (iv.bus == j && iv.start_min <= t && t < iv.end_min) return &iv;
    return nullptr;
}

std::string plan_csv(const ChargePlan& plan, const std::vector<std::string>& bus_ids,
                     const std::vector<std::string>& charger_ids) {
    std::ostringstream out;
    out << "bus,charger_type,start_min,end_min,kwh_gained\n";
    for (const auto& iv : plan.intervals)
        out << bus_ids.at(iv.bus) << ',' << charger_ids.at(iv.charger) << ',' << fmt_num(iv.start_min) << ','
            << fmt_num(iv.end_min) << ',' << fmt_num(iv.kwh) << '\n';
    return out.str();
}

}  // namespace beb
