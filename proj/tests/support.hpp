#pragma once

// Small hand-built instances shared by the unit tests.

#include <string>
#include <vector>

#include "beb/scenario.hpp"

namespace beb::test {

inline ScheduleBlock depot(double a, double b) { return {BlockKind::at_depot, a, b, {}, 0.0}; }
inline ScheduleBlock route(double a, double b, double kw) { return {BlockKind::on_route, a, b, {}, kw}; }
inline ScheduleBlock station(double a, double b, std::vector<std::string> chargers) {
    return {BlockKind::in_station, a, b, std::move(chargers), 0.0};
}

inline ChargerType charger(std::string id, int count, double p_cc, double alpha,
                           ChargerClass cls = ChargerClass::slow) {
    ChargerType c;
    c.id = std::move(id);
    c.count = count;
    c.p_cc_kw = p_cc;
    c.alpha_per_h = alpha;
    c.location = "station";
    c.noise_class = cls;
    return c;
}

inline Bus bus(std::string id, double capacity, double eta, std::vector<ScheduleBlock> blocks, double initial = 0.7,
               double final_soc = 0.7, double min_soc = 0.15, double max_soc = 0.95) {
    Bus b;
    b.id = std::move(id);
    b.capacity_kwh = capacity;
    b.eta = eta;
    b.initial_soc = initial;
    b.final_soc = final_soc;
    b.min_soc = min_soc;
    b.max_soc = max_soc;
    b.schedule = std::move(blocks);
    return b;
}

/// Off-peak everywhere unless windows are given.
inline RateSchedule rates(double off, double on, double c_b, double c_tou, std::vector<TimeWindow> peaks = {},
                          double window = 15.0) {
    RateSchedule r;
    r.c_offpeak = off;
    r.c_onpeak = on;
    r.c_b = c_b;
    r.c_tou = c_tou;
    r.peak_windows = std::move(peaks);
    r.demand_window_min = window;
    return r;
}

inline Scenario scenario(std::vector<Bus> buses, std::vector<ChargerType> chargers, RateSchedule r, double start,
                         double end) {
    Scenario sc;
    sc.buses = std::move(buses);
    sc.charger_types = std::move(chargers);
    sc.rates = std::move(r);
    sc.day_start_min = start;
    sc.day_end_min = end;
    validate(sc);
    return sc;
}

inline std::string data_path(const std::string& name) { return std::string(BEB_SOURCE_DIR) + "/data/" + name; }

}  // namespace beb::test
