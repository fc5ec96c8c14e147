#include "beb/sim/truth.hpp"

#include <algorithm>
#include <cmath>

#include "beb/errors.hpp"

namespace beb::sim {

double truth_discharge_step(double soc, double d, double bias_kw, double sigma_nu, double z, double dt_s,
                            double capacity) {
    const double s = soc - d + bias_kw * (dt_s / 3600.0) + sigma_nu * std::sqrt(dt_s) * z;
    return std::clamp(s, 0.0, capacity);
}

double truth_charge_step(double soc, double gain, bool active, double bias_kw, double sigma_nu, double z, double dt_s,
                         double capacity) {
    double s = soc + gain;
    if (active) s += bias_kw * (dt_s / 3600.0) + sigma_nu * std::sqrt(dt_s) * z;
    return std::clamp(s, 0.0, capacity);
}

TruthEnvironment::TruthEnvironment(const Scenario& nominal, const NoiseParams& params, std::uint64_t seed,
                                   double dt_min, std::vector<double> initial_kwh)
    : nominal_(nominal), params_(params) {
    if (!(dt_min > 0)) throw ValidationError("simulation step must be positive");
    const int J = static_cast<int>(nominal.buses.size());
    const int L = static_cast<int>(nominal.charger_types.size());
    const int n = static_cast<int>(std::floor((nominal.day_end_min - nominal.day_start_min) / dt_min + 1e-9));
    noise_ = sample_run_noise(params, nominal, seed, n);
    actual_ = perturb_arrivals(nominal, noise_.arrival_s);

    charge_.resize(static_cast<std::size_t>(J) * L);
    for (int j = 0; j < J; ++j)
        for (int l = 0; l < L; ++l)
            charge_[static_cast<std::size_t>(j) * L + l] =
                continuous_params(nominal.charger_types[l].p_cc_kw, nominal.alpha(j, l), nominal.buses[j].eta,
                                  nominal.buses[j].capacity_kwh);

    soc_.resize(J);
    for (int j = 0; j < J; ++j)
        soc_[j] = initial_kwh.empty() ? nominal.buses[j].initial_soc * nominal.buses[j].capacity_kwh : initial_kwh[j];

    tr_.t0_min = nominal.day_start_min;
    tr_.dt_min = dt_min;
    tr_.n_steps = n;
    tr_.n_buses = J;
    tr_.soc.reserve(static_cast<std::size_t>(n + 1) * J);
    tr_.soc.insert(tr_.soc.end(), soc_.begin(), soc_.end());
}

double TruthEnvironment::station_overlap(int j, int l, double a, double b) const {
    const auto& id = actual_.charger_types[l].id;
    double total = 0.0;
    for (const auto& blk : actual_.buses[j].schedule) {
        if (blk.kind != BlockKind::in_station) continue;
        if (std::find(blk.chargers.begin(), blk.chargers.end(), id) == blk.chargers.end()) continue;
        total += std::max(0.0, std::min(b, blk.end_min) - std::max(a, blk.start_min));
    }
    return total;
}

bool TruthEnvironment::at_station(int j, int l, double t) const {
    const auto& id = actual_.charger_types[l].id;
    for (const auto& blk : actual_.buses[j].schedule)
        if (blk.kind == BlockKind::in_station && t >= blk.start_min && t < blk.end_min &&
            std::find(blk.chargers.begin(), blk.chargers.end(), id) != blk.chargers.end())
            return true;
    return false;
}

StepOutcome TruthEnvironment::advance(const std::vector<BusCommand>& cmd, double duration_min) {
    const int J = tr_.n_buses;
    const int L = static_cast<int>(actual_.charger_types.size());
    StepOutcome out;
    out.gain.assign(J, 0.0);
    out.charger.assign(J, -1);
    const int n_sub = std::max(1, static_cast<int>(std::lround(duration_min / tr_.dt_min)));
    for (int s = 0; s < n_sub && step_ < tr_.n_steps; ++s, ++step_) {
        const double a = tr_.time(step_), b = tr_.time(step_ + 1);
        double bus_e = 0.0;
        for (int j = 0; j < J; ++j) {
            const Bus& bus = actual_.buses[j];
            const double E = bus.capacity_kwh;
            double soc = soc_[j];
            double gain = 0.0;
            int used = -1;
            const BusCommand c = j < static_cast<int>(cmd.size()) ? cmd[j] : BusCommand{};
            if (c.charger >= 0 && c.charger < L) {
                const double present = station_overlap(j, c.charger, a, b);
                if (present > 1e-9) {
                    used = c.charger;
                    const double h = present / 60.0;
                    const auto& cp = charge_[static_cast<std::size_t>(j) * L + c.charger];
                    double e = std::isfinite(c.power_kw) ? c.power_kw * h : INFINITY;
                    e = std::min(e, simulate_exact_clamped(soc, h, cp) - soc);
                    if (std::isfinite(c.stop_kwh)) e = std::min(e, c.stop_kwh - soc);
                    e = std::max(0.0, e);
                    const auto cls = actual_.charger_types[c.charger].noise_class;
                    const double before = soc;
                    soc = truth_charge_step(soc, e, e > 0.0, noise_.bias_c[c.charger], params_.sigma_nu_c(cls),
                                            noise_.zc(step_, c.charger), present * 60.0, E);
                    gain = soc - before;
                }
            }
            // Route discharge over whatever part of the step is on route.
            double route = 0.0, d = 0.0;
            for (const auto& blk : bus.schedule) {
                if (blk.kind != BlockKind::on_route) continue;
                const double o = std::max(0.0, std::min(b, blk.end_min) - std::max(a, blk.start_min));
                route += o;
                d += blk.route_power_kw * o / 60.0;
            }
            if (route > 1e-9)
                soc = truth_discharge_step(soc, d, noise_.bias_d[j], params_.sigma_nu_d, noise_.zd(step_, j), route * 60.0,
                                           E);
            soc_[j] = soc;
            tr_.gain.push_back(gain);
            tr_.charger.push_back(used);
            out.gain[j] += gain;
            if (used >= 0) out.charger[j] = used;
            bus_e += std::max(0.0, gain);
            const double floor_kwh = nominal_.buses[j].min_soc * E;
            if (soc < floor_kwh - 1e-9) {
                ++tr_.violation_steps;
                tr_.worst_violation = std::max(tr_.worst_violation, floor_kwh - soc);
            }
        }
        const double load = nominal_.load_energy(a, b);
        tr_.bus_energy.push_back(bus_e);
        tr_.load_energy.push_back(load);
        tr_.soc.insert(tr_.soc.end(), soc_.begin(), soc_.end());
        out.bus_energy += bus_e;
        out.load_energy += load;
    }
    return out;
}

}  // namespace beb::sim
