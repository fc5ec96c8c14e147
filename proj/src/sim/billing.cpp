#include "beb/sim/billing.hpp"

#include <algorithm>
#include <cmath>

namespace beb::sim {

Bill billing_oracle(const EnergySeries& s, const RateSchedule& rates) {
    Bill bill;
    const int K = static_cast<int>(s.bus.size());
    const double dt = s.delta_min;
    const double window = rates.demand_window_min;
    const int H = static_cast<int>(s.history.size());

    // Total energy of step i, i < 0 reaching into the history.
    auto energy = [&](int i) {
        if (i >= 0) return s.bus[i] + (i < static_cast<int>(s.load.size()) ? s.load[i] : 0.0);
        const int back = -i;
        return back <= H ? s.history[H - back] : 0.0;
    };

    for (int k = 0; k < K; ++k) bill.cost.consumption += consumption_rate_at(rates, s.t0_min + k * dt) * s.bus[k];

    bill.p_window.assign(K + 1, 0.0);
    for (int k = 1; k <= K; ++k) {
        const double hi = s.t0_min + k * dt;
        const double lo = hi - window;
        // Mean power over [lo, hi): each step contributes energy * overlap / dt.
        double kwh = 0.0;
        const int first = static_cast<int>(std::floor((lo - s.t0_min) / dt + 1e-9));
        for (int i = std::min(first, k - 1); i < k; ++i) {
            const double a = s.t0_min + i * dt, b = a + dt;
            const double overlap = std::min(b, hi) - std::max(a, lo);
            if (overlap <= 1e-9 * dt) continue;
            kwh += energy(i) * (overlap / dt);
        }
        const double p = kwh / (window / 60.0);
        bill.p_window[k] = p;
        bill.p_max = std::max(bill.p_max, p);
        // The window ending at t_k is billed on-peak when its last step starts on-peak.
        if (rates.is_peak(hi - dt)) bill.p_max_tou = std::max(bill.p_max_tou, p);
    }
    bill.cost.baseline = rates.c_b * bill.p_max;
    bill.cost.tou = rates.c_tou * bill.p_max_tou;
    return bill;
}

std::vector<double> rebin(const std::vector<double>& fine, int factor) {
    std::vector<double> out((fine.size() + factor - 1) / factor, 0.0);
    for (std::size_t i = 0; i < fine.size(); ++i) out[i / factor] += fine[i];
    return out;
}

}  // namespace beb::sim
