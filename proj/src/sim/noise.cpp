#include "beb/sim/noise.hpp"

#include <algorithm>

#include "beb/discretize.hpp"
#include "beb/rng.hpp"

namespace beb::sim {

NoiseParams NoiseParams::paper() {
    NoiseParams p;
    p.sigma_nu_d = 0.05;
    p.sigma_beta_d = 1.2;
    p.sigma_nu_c_slow = 0.04167;
    p.sigma_nu_c_fast = 0.0833;
    p.sigma_beta_c_slow = 1.2;
    p.sigma_beta_c_fast = 2.4;
    p.sigma_a_s = 120.0;
    return p;
}

RunNoise sample_run_noise(const NoiseParams& p, const Scenario& sc, std::uint64_t seed, int n_steps) {
    RunNoise r;
    const int J = static_cast<int>(sc.buses.size());
    const int L = static_cast<int>(sc.charger_types.size());
    r.n_steps = n_steps;
    r.n_buses = J;
    r.n_chargers = L;

    Rng bias(derive_seed(seed, 1));
    r.bias_d.resize(J);
    for (int j = 0; j < J; ++j) r.bias_d[j] = p.sigma_beta_d * bias.normal();
    Rng cbias(derive_seed(seed, 2));
    r.bias_c.resize(L);
    for (int l = 0; l < L; ++l) r.bias_c[l] = p.sigma_beta_c(sc.charger_types[l].noise_class) * cbias.normal();

    int n_visits = 0;
    for (const auto& row : visit_ids(sc))
        for (int v : row) n_visits = std::max(n_visits, v + 1);
    Rng arr(derive_seed(seed, 3));
    r.arrival_s.resize(n_visits);
    for (auto& a : r.arrival_s) a = p.sigma_a_s * arr.normal();

    r.z_d.resize(static_cast<std::size_t>(n_steps) * J);
    for (int j = 0; j < J; ++j) {
        Rng s(derive_seed(seed, 1000 + static_cast<std::uint64_t>(j)));
        for (int i = 0; i < n_steps; ++i) r.z_d[static_cast<std::size_t>(i) * J + j] = s.normal();
    }
    r.z_c.resize(static_cast<std::size_t>(n_steps) * L);
    for (int l = 0; l < L; ++l) {
        Rng s(derive_seed(seed, 2000 + static_cast<std::uint64_t>(l)));
        for (int i = 0; i < n_steps; ++i) r.z_c[static_cast<std::size_t>(i) * L + l] = s.normal();
    }
    return r;
}

Scenario perturb_arrivals(const Scenario& sc, const std::vector<double>& arrival_s) {
    Scenario out = sc;
    const auto ids = visit_ids(sc);
    for (std::size_t j = 0; j < out.buses.size(); ++j) {
        auto& blocks = out.buses[j].schedule;
        for (std::size_t b = 0; b < blocks.size(); ++b) {
            const int vid = ids[j][b];
            if (vid < 0 || vid >= static_cast<int>(arrival_s.size())) continue;
            auto& blk = blocks[b];
            const double prev_departure = b > 0 ? blocks[b - 1].start_min : sc.day_start_min;
            double t = std::clamp(blk.start_min + arrival_s[vid] / 60.0, prev_departure, blk.end_min);
            if (b > 0 && blocks[b - 1].kind == BlockKind::on_route) {
                auto& route = blocks[b - 1];
                const double old_len = route.end_min - route.start_min;
                const double new_len = std::max(t - route.start_min, 1e-6);
                route.route_power_kw *= old_len / new_len;
                route.end_min = route.start_min + new_len;
                t = std::min(route.end_min, blk.end_min);
            } else if (b > 0) {
                blocks[b - 1].end_min = t;
            }
            blk.start_min = t;
        }
    }
    return out;
}

}  // namespace beb::sim
