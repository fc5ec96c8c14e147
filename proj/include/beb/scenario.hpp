#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace beb {

// Times are wall-clock minutes since midnight; energies kWh; powers kW.

enum class BlockKind { on_route, in_station, at_depot };

enum class ChargerClass { slow, fast };

struct ChargerType {
    std::string id;
    int count = 1;
    double p_cc_kw = 0.0;
    double alpha_per_h = 0.0;  // CV decay rate, shared by all buses unless overridden
    std::string location;
    ChargerClass noise_class = ChargerClass::slow;
};

struct ScheduleBlock {
    BlockKind kind = BlockKind::at_depot;
    double start_min = 0.0;
    double end_min = 0.0;
    std::vector<std::string> chargers;  // in_station only
    double route_power_kw = 0.0;        // on_route only
};

struct Bus {
    std::string id;
    double capacity_kwh = 0.0;
    double eta = 1.0;  // SOC fraction where CC switches to CV
    double initial_soc = 0.7;
    double final_soc = 0.7;
    double min_soc = 0.0;
    double max_soc = 1.0;
    std::vector<ScheduleBlock> schedule;
    std::map<std::string, double> alpha_override;  // charger id -> alpha (1/h)
};

struct TimeWindow {
    double start_min = 0.0;
    double end_min = 0.0;
    bool contains(double t) const { return t >= start_min && t < end_min; }
};

struct RateSchedule {
    double c_offpeak = 0.0;  // $/kWh
    double c_onpeak = 0.0;   // $/kWh
    double c_b = 0.0;        // $/kW, whole-day demand
    double c_tou = 0.0;      // $/kW, on-peak demand
    std::vector<TimeWindow> peak_windows;
    double demand_window_min = 15.0;

    bool is_peak(double t_min) const;
};

/// Uncontrolled load as piecewise-constant energy per profile step.
/// Sample i covers [time_i, time_{i+1}); the last one covers one more spacing
/// (or until day end when it is the only sample).
struct LoadSample {
    double time_min = 0.0;
    double kwh_per_step = 0.0;
};

struct Scenario {
    std::vector<Bus> buses;
    std::vector<ChargerType> charger_types;
    RateSchedule rates;
    std::vector<LoadSample> load_profile;
    double day_start_min = 0.0;
    double day_end_min = 24.0 * 60.0;

    /// Index of a charger type id, or -1.
    int charger_index(std::string_view id) const;
    /// CV decay rate for bus j on charger type l, honouring per-bus overrides.
    double alpha(std::size_t bus, std::size_t charger) const;
    /// Uncontrolled energy drawn over [t0, t1).
    double load_energy(double t0_min, double t1_min) const;
};

/// Rocky Mountain Power Schedule 8 winter values used by the experiments.
RateSchedule schedule8_rates();

/// $/kWh at wall-clock minute t (half-open peak windows).
double consumption_rate_at(const RateSchedule& rates, double t_min);

/// Throws ValidationError naming the first violated invariant.
void validate(const Scenario& scenario);

/// Parses a YAML scenario document. Relative `load_profile.file` entries are
/// resolved against `base_dir`.
Scenario load_scenario(std::string_view text, const std::string& base_dir = ".");
Scenario load_scenario_file(const std::string& path);
std::string to_yaml(const Scenario& scenario);

/// CSV `time,kwh_per_step` with HH:MM times.
std::vector<LoadSample> parse_load_profile_csv(std::string_view text);

struct GeneratorBounds {
    double route_min_lo = 45.0, route_min_hi = 150.0;
    double dwell_min_lo = 20.0, dwell_min_hi = 45.0;
    double power_kw_lo = 28.0, power_kw_hi = 36.0;
    double first_departure_lo = 5.0 * 60.0, first_departure_hi = 6.0 * 60.0;
    double evening_return = 23.0 * 60.0;
    double day_start = 5.0 * 60.0;
    double day_end = 23.0 * 60.0;
    double capacity_kwh = 440.0;
    double eta = 0.8;
    double initial_soc = 0.7;
    double final_soc = 0.7;
    double min_soc = 0.15;
    double max_soc = 0.95;
    std::vector<ChargerType> chargers;  // empty -> default slow/fast station
    RateSchedule rates = schedule8_rates();
};

/// Random alternating route/station schedules. Pure function of its inputs.
Scenario generate_random_scenario(int n_buses, std::uint64_t seed,
                                  const GeneratorBounds& bounds = {});

std::string format_hhmm(double t_min);
/// Accepts "HH:MM" (HH may exceed 23) or a plain number of minutes.
double parse_hhmm(std::string_view text);

std::string_view to_string(BlockKind kind);
std::string_view to_string(ChargerClass cls);

}  // namespace beb
