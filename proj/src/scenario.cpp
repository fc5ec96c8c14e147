#include "beb/scenario.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "beb/errors.hpp"
#include "beb/rng.hpp"

namespace beb {

namespace {

std::string mark_str(const YAML::Node& n) {
    const YAML::Mark m = n.Mark();
    if (m.is_null()) return "?";
    return std::to_string(m.line + 1) + ":" + std::to_string(m.column + 1);
}

[[noreturn]] void fail(const YAML::Node& n, const std::string& field, const std::string& what) {
    throw ParseError(mark_str(n), field + ": " + what);
}

const YAML::Node require(const YAML::Node& parent, const char* key, const std::string& path) {
    const YAML::Node n = parent[key];
    if (!n) fail(parent, path, std::string("missing key '") + key + "'");
    return n;
}

double as_double(const YAML::Node& n, const std::string& path) {
    if (!n.IsScalar()) fail(n, path, "expected a number");
    try {
        return n.as<double>();
    } catch (const YAML::Exception&) {
        fail(n, path, "expected a number, got '" + n.Scalar() + "'");
    }
}

int as_int(const YAML::Node& n, const std::string& path) {
    const double v = as_double(n, path);
    if (v != std::floor(v) || std::abs(v) > 1e9) fail(n, path, "expected an integer");
    return static_cast<int>(v);
}

std::string as_string(const YAML::Node& n, const std::string& path) {
    if (!n.IsScalar()) fail(n, path, "expected a string");
    return n.Scalar();
}

double as_time(const YAML::Node& n, const std::string& path) {
    if (!n.IsScalar()) fail(n, path, "expected HH:MM");
    try {
        return parse_hhmm(n.Scalar());
    } catch (const std::invalid_argument& e) {
        fail(n, path, e.what());
    }
}

double opt_double(const YAML::Node& parent, const char* key, double fallback, const std::string& path) {
    const YAML::Node n = parent[key];
    return n ? as_double(n, path + "." + key) : fallback;
}

BlockKind parse_kind(const YAML::Node& n, const std::string& path) {
    const std::string s = as_string(n, path);
    if (s == "on_route") return BlockKind::on_route;
    if (s == "in_station") return BlockKind::in_station;
    if (s == "at_depot") return BlockKind::at_depot;
    fail(n, path, "unknown block kind '" + s + "'");
}

ChargerClass parse_class(const YAML::Node& n, const std::string& path) {
    const std::string s = as_string(n, path);
    if (s == "slow") return ChargerClass::slow;
    if (s == "fast") return ChargerClass::fast;
    fail(n, path, "unknown charger class '" + s + "'");
}

std::string num(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError(path, "cannot open file");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

std::string_view to_string(BlockKind kind) {
    switch (kind) {
        case BlockKind::on_route: return "on_route";
        case BlockKind::in_station: return "in_station";
        case BlockKind::at_depot: return "at_depot";
    }
    return "?";
}

std::string_view to_string(ChargerClass cls) {
    return cls == ChargerClass::fast ? "fast" : "slow";
}

std::string format_hhmm(double t_min) {
    const long total = std::lround(t_min);
    char buf[32];
    std::snprintf(buf, sizeof buf, "%02ld:%02ld", total / 60, total % 60);
    std::string out(buf);
    const double frac = t_min - static_cast<double>(total);
    if (std::abs(frac) > 1e-9) return num(t_min);  // non-integral minutes keep full precision
    return out;
}

double parse_hhmm(std::string_view text) {
    const std::string s(text);
    const auto colon = s.find(':');
    try {
        if (colon == std::string::npos) {
            std::size_t used = 0;
            const double v = std::stod(s, &used);
            if (used != s.size()) throw std::invalid_argument("");
            return v;
        }
        std::size_t used_h = 0, used_m = 0;
        const std::string hs = s.substr(0, colon), ms = s.substr(colon + 1);
        const int h = std::stoi(hs, &used_h);
        const int m = std::stoi(ms, &used_m);
        if (used_h != hs.size() || used_m != ms.size() || h < 0 || m < 0 || m >= 60)
            throw std::invalid_argument("");
        return h * 60.0 + m;
    } catch (const std::logic_error&) {
        throw std::invalid_argument("bad time '" + s + "' (expected HH:MM)");
    }
}

bool RateSchedule::is_peak(double t_min) const {
    return std::any_of(peak_windows.begin(), peak_windows.end(),
                       [&](const TimeWindow& w) { return w.contains(t_min); });
}

double consumption_rate_at(const RateSchedule& rates, double t_min) {
    return rates.is_peak(t_min) ? rates.c_onpeak : rates.c_offpeak;
}

RateSchedule schedule8_rates() {
    RateSchedule r;
    r.c_onpeak = 0.051577;
    r.c_offpeak = 0.026216;
    r.c_b = 4.81;
    r.c_tou = 13.92;
    r.peak_windows = {{6 * 60.0, 9 * 60.0}, {18 * 60.0, 22 * 60.0}};
    r.demand_window_min = 15.0;
    return r;
}

int Scenario::charger_index(std::string_view id) const {
    for (std::size_t i = 0; i < charger_types.size(); ++i)
        if (charger_types[i].id == id) return static_cast<int>(i);
    return -1;
}

double Scenario::alpha(std::size_t bus, std::size_t charger) const {
    const auto& ov = buses[bus].alpha_override;
    auto it = ov.find(charger_types[charger].id);
    return it != ov.end() ? it->second : charger_types[charger].alpha_per_h;
}

double Scenario::load_energy(double t0, double t1) const {
    if (load_profile.empty() || t1 <= t0) return 0.0;
    double total = 0.0;
    const std::size_t n = load_profile.size();
    for (std::size_t i = 0; i < n; ++i) {
        const double a = load_profile[i].time_min;
        double b;
        if (i + 1 < n) {
            b = load_profile[i + 1].time_min;
        } else if (n >= 2) {
            b = a + (a - load_profile[i - 1].time_min);
        } else {
            b = day_end_min;
        }
        if (b <= a) continue;
        const double lo = std::max(a, t0), hi = std::min(b, t1);
        if (hi > lo) total += load_profile[i].kwh_per_step * (hi - lo) / (b - a);
    }
    return total;
}

void validate(const Scenario& sc) {
    if (sc.buses.empty()) throw ValidationError("no buses");
    if (!(sc.day_end_min > sc.day_start_min)) throw ValidationError("day_end must be after day_start");
    for (const auto& c : sc.charger_types) {
        if (c.count < 1) throw ValidationError("charger type '" + c.id + "': count must be >= 1");
        if (!(c.p_cc_kw > 0)) throw ValidationError("charger type '" + c.id + "': p_cc_kw must be > 0");
        if (!(c.alpha_per_h > 0)) throw ValidationError("charger type '" + c.id + "': alpha_per_h must be > 0");
    }
    for (std::size_t i = 0; i < sc.charger_types.size(); ++i)
        for (std::size_t j = i + 1; j < sc.charger_types.size(); ++j)
            if (sc.charger_types[i].id == sc.charger_types[j].id)
                throw ValidationError("duplicate charger type id '" + sc.charger_types[i].id + "'");

    const auto& r = sc.rates;
    if (r.c_offpeak < 0 || r.c_onpeak < 0 || r.c_b < 0 || r.c_tou < 0)
        throw ValidationError("rates must be >= 0");
    if (!(r.demand_window_min > 0)) throw ValidationError("demand_window_min must be > 0");
    auto windows = r.peak_windows;
    std::sort(windows.begin(), windows.end(),
              [](const TimeWindow& a, const TimeWindow& b) { return a.start_min < b.start_min; });
    for (std::size_t i = 0; i < windows.size(); ++i) {
        if (!(windows[i].end_min > windows[i].start_min))
            throw ValidationError("peak window " + format_hhmm(windows[i].start_min) + " is empty");
        if (i > 0 && windows[i].start_min < windows[i - 1].end_min)
            throw ValidationError("peak windows overlap at " + format_hhmm(windows[i].start_min));
    }

    for (std::size_t bi = 0; bi < sc.buses.size(); ++bi) {
        const Bus& b = sc.buses[bi];
        const std::string who = "bus '" + b.id + "'";
        for (std::size_t bj = 0; bj < bi; ++bj)
            if (sc.buses[bj].id == b.id) throw ValidationError("duplicate bus id '" + b.id + "'");
        if (!(b.capacity_kwh > 0)) throw ValidationError(who + ": capacity_kwh must be > 0");
        if (!(b.eta > 0 && b.eta <= 1)) throw ValidationError(who + ": eta must be in (0,1]");
        if (!(b.min_soc >= 0 && b.min_soc < b.max_soc && b.max_soc <= 1))
            throw ValidationError(who + ": need 0 <= min_soc < max_soc <= 1");
        for (double s : {b.initial_soc, b.final_soc})
            if (!(s >= 0 && s <= 1)) throw ValidationError(who + ": initial/final soc must be in [0,1]");
        for (const auto& [cid, a] : b.alpha_override) {
            if (sc.charger_index(cid) < 0)
                throw ValidationError(who + ": alpha override for unknown charger type '" + cid + "'");
            if (!(a > 0)) throw ValidationError(who + ": alpha override must be > 0");
        }
        for (std::size_t k = 0; k < b.schedule.size(); ++k) {
            const ScheduleBlock& blk = b.schedule[k];
            const std::string where = who + " block " + std::to_string(k);
            if (!(blk.end_min > blk.start_min)) throw ValidationError(where + ": end must be after start");
            if (blk.start_min < sc.day_start_min || blk.end_min > sc.day_end_min)
                throw ValidationError(where + ": outside the operating day");
            if (k > 0 && blk.start_min < b.schedule[k - 1].end_min)
                throw ValidationError(who + ": blocks " + std::to_string(k - 1) + " and " +
                                      std::to_string(k) + " overlap or are out of order");
            const bool station = blk.kind == BlockKind::in_station;
            if (station == blk.chargers.empty())
                throw ValidationError(where + ": chargers must be listed exactly for in_station blocks");
            for (const auto& cid : blk.chargers)
                if (sc.charger_index(cid) < 0)
                    throw ValidationError(where + ": unknown charger type '" + cid + "'");
            if (blk.kind == BlockKind::on_route && blk.route_power_kw < 0)
                throw ValidationError(where + ": route power must be >= 0");
        }
    }
    for (std::size_t i = 1; i < sc.load_profile.size(); ++i)
        if (!(sc.load_profile[i].time_min > sc.load_profile[i - 1].time_min))
            throw ValidationError("load profile times must be strictly increasing");
}

std::vector<LoadSample> parse_load_profile_csv(std::string_view text) {
    std::vector<LoadSample> out;
    std::istringstream in{std::string(text)};
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        if (lineno == 1 && line.rfind("time", 0) == 0) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos) throw ParseError("line " + std::to_string(lineno), "expected time,kwh_per_step");
        LoadSample s;
        try {
            s.time_min = parse_hhmm(line.substr(0, comma));
            s.kwh_per_step = std::stod(line.substr(comma + 1));
        } catch (const std::exception& e) {
            throw ParseError("line " + std::to_string(lineno), e.what());
        }
        out.push_back(s);
    }
    return out;
}

Scenario load_scenario(std::string_view text, const std::string& base_dir) {
    YAML::Node root;
    try {
        root = YAML::Load(std::string(text));
    } catch (const YAML::ParserException& e) {
        throw ParseError(std::to_string(e.mark.line + 1) + ":" + std::to_string(e.mark.column + 1), e.msg);
    }
    if (!root.IsMap()) throw ParseError("1:1", "scenario document must be a mapping");

    Scenario sc;
    sc.day_start_min = root["day_start"] ? as_time(root["day_start"], "day_start") : 0.0;
    sc.day_end_min = root["day_end"] ? as_time(root["day_end"], "day_end") : 24 * 60.0;

    if (const YAML::Node cts = root["charger_types"]) {
        if (!cts.IsSequence()) fail(cts, "charger_types", "expected a list");
        for (std::size_t i = 0; i < cts.size(); ++i) {
            const YAML::Node c = cts[i];
            const std::string p = "charger_types[" + std::to_string(i) + "]";
            ChargerType ct;
            ct.id = as_string(require(c, "id", p), p + ".id");
            ct.count = c["count"] ? as_int(c["count"], p + ".count") : 1;
            ct.p_cc_kw = as_double(require(c, "p_cc_kw", p), p + ".p_cc_kw");
            ct.alpha_per_h = as_double(require(c, "alpha_per_h", p), p + ".alpha_per_h");
            ct.location = c["location"] ? as_string(c["location"], p + ".location") : "";
            ct.noise_class = c["class"] ? parse_class(c["class"], p + ".class") : ChargerClass::slow;
            sc.charger_types.push_back(std::move(ct));
        }
    }

    sc.rates = schedule8_rates();
    if (const YAML::Node r = root["rates"]) {
        const std::string p = "rates";
        sc.rates.c_offpeak = opt_double(r, "c_offpeak", sc.rates.c_offpeak, p);
        sc.rates.c_onpeak = opt_double(r, "c_onpeak", sc.rates.c_onpeak, p);
        sc.rates.c_b = opt_double(r, "c_b", sc.rates.c_b, p);
        sc.rates.c_tou = opt_double(r, "c_tou", sc.rates.c_tou, p);
        sc.rates.demand_window_min = opt_double(r, "demand_window_min", sc.rates.demand_window_min, p);
        if (const YAML::Node pw = r["peak_windows"]) {
            if (!pw.IsSequence()) fail(pw, "rates.peak_windows", "expected a list of [start, end]");
            sc.rates.peak_windows.clear();
            for (std::size_t i = 0; i < pw.size(); ++i) {
                const std::string q = "rates.peak_windows[" + std::to_string(i) + "]";
                if (!pw[i].IsSequence() || pw[i].size() != 2) fail(pw[i], q, "expected [start, end]");
                sc.rates.peak_windows.push_back({as_time(pw[i][0], q), as_time(pw[i][1], q)});
            }
        }
    }

    const YAML::Node buses = root["buses"];
    if (buses) {
        if (!buses.IsSequence()) fail(buses, "buses", "expected a list");
        for (std::size_t i = 0; i < buses.size(); ++i) {
            const YAML::Node b = buses[i];
            const std::string p = "buses[" + std::to_string(i) + "]";
            Bus bus;
            bus.id = as_string(require(b, "id", p), p + ".id");
            bus.capacity_kwh = as_double(require(b, "capacity_kwh", p), p + ".capacity_kwh");
            bus.eta = opt_double(b, "eta", 1.0, p);
            bus.initial_soc = opt_double(b, "initial_soc", 0.7, p);
            bus.final_soc = opt_double(b, "final_soc", bus.initial_soc, p);
            bus.min_soc = opt_double(b, "min_soc", 0.0, p);
            bus.max_soc = opt_double(b, "max_soc", 1.0, p);
            if (const YAML::Node ov = b["alpha_per_h"]) {
                if (!ov.IsMap()) fail(ov, p + ".alpha_per_h", "expected a map charger id -> alpha");
                for (const auto& kv : ov)
                    bus.alpha_override[kv.first.Scalar()] = as_double(kv.second, p + ".alpha_per_h");
            }
            const YAML::Node sched = require(b, "schedule", p);
            if (!sched.IsSequence()) fail(sched, p + ".schedule", "expected a list");
            for (std::size_t k = 0; k < sched.size(); ++k) {
                const YAML::Node s = sched[k];
                const std::string q = p + ".schedule[" + std::to_string(k) + "]";
                ScheduleBlock blk;
                blk.kind = parse_kind(require(s, "kind", q), q + ".kind");
                blk.start_min = as_time(require(s, "start", q), q + ".start");
                blk.end_min = as_time(require(s, "end", q), q + ".end");
                if (blk.kind == BlockKind::on_route)
                    blk.route_power_kw = as_double(require(s, "power_kw", q), q + ".power_kw");
                if (const YAML::Node ch = s["chargers"]) {
                    if (!ch.IsSequence()) fail(ch, q + ".chargers", "expected a list");
                    for (const auto& c : ch) blk.chargers.push_back(as_string(c, q + ".chargers"));
                }
                bus.schedule.push_back(std::move(blk));
            }
            sc.buses.push_back(std::move(bus));
        }
    }

    if (const YAML::Node lp = root["load_profile"]) {
        if (lp.IsMap() && lp["file"]) {
            std::filesystem::path f = as_string(lp["file"], "load_profile.file");
            if (f.is_relative()) f = std::filesystem::path(base_dir) / f;
            try {
                sc.load_profile = parse_load_profile_csv(read_file(f.string()));
            } catch (const ParseError& e) {
                throw ParseError(f.string() + ":" + e.where(), e.what());
            }
        } else {
            const YAML::Node rows = lp.IsMap() ? lp["rows"] : lp;
            if (!rows || !rows.IsSequence()) fail(lp, "load_profile", "expected 'file' or a list of [time, kwh]");
            for (std::size_t i = 0; i < rows.size(); ++i) {
                const std::string q = "load_profile[" + std::to_string(i) + "]";
                if (!rows[i].IsSequence() || rows[i].size() != 2) fail(rows[i], q, "expected [time, kwh]");
                sc.load_profile.push_back({as_time(rows[i][0], q), as_double(rows[i][1], q)});
            }
        }
    }

    validate(sc);
    return sc;
}

Scenario load_scenario_file(const std::string& path) {
    const std::string text = read_file(path);
    const auto dir = std::filesystem::path(path).parent_path();
    try {
        return load_scenario(text, dir.empty() ? "." : dir.string());
    } catch (const ParseError& e) {
        throw ParseError(path + ":" + e.where(), std::string(e.what()).substr(e.where().size() + 2));
    }
}

std::string to_yaml(const Scenario& sc) {
    YAML::Emitter out;
    out << YAML::BeginMap;
    out << YAML::Key << "day_start" << YAML::Value << format_hhmm(sc.day_start_min);
    out << YAML::Key << "day_end" << YAML::Value << format_hhmm(sc.day_end_min);

    out << YAML::Key << "charger_types" << YAML::Value << YAML::BeginSeq;
    for (const auto& c : sc.charger_types) {
        out << YAML::BeginMap;
        out << YAML::Key << "id" << YAML::Value << c.id;
        out << YAML::Key << "count" << YAML::Value << c.count;
        out << YAML::Key << "p_cc_kw" << YAML::Value << num(c.p_cc_kw);
        out << YAML::Key << "alpha_per_h" << YAML::Value << num(c.alpha_per_h);
        if (!c.location.empty()) out << YAML::Key << "location" << YAML::Value << c.location;
        out << YAML::Key << "class" << YAML::Value << std::string(to_string(c.noise_class));
        out << YAML::EndMap;
    }
    out << YAML::EndSeq;

    const auto& r = sc.rates;
    out << YAML::Key << "rates" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "c_offpeak" << YAML::Value << num(r.c_offpeak);
    out << YAML::Key << "c_onpeak" << YAML::Value << num(r.c_onpeak);
    out << YAML::Key << "c_b" << YAML::Value << num(r.c_b);
    out << YAML::Key << "c_tou" << YAML::Value << num(r.c_tou);
    out << YAML::Key << "demand_window_min" << YAML::Value << num(r.demand_window_min);
    out << YAML::Key << "peak_windows" << YAML::Value << YAML::BeginSeq;
    for (const auto& w : r.peak_windows)
        out << YAML::Flow << YAML::BeginSeq << format_hhmm(w.start_min) << format_hhmm(w.end_min) << YAML::EndSeq;
    out << YAML::EndSeq << YAML::EndMap;

    out << YAML::Key << "buses" << YAML::Value << YAML::BeginSeq;
    for (const auto& b : sc.buses) {
        out << YAML::BeginMap;
        out << YAML::Key << "id" << YAML::Value << b.id;
        out << YAML::Key << "capacity_kwh" << YAML::Value << num(b.capacity_kwh);
        out << YAML::Key << "eta" << YAML::Value << num(b.eta);
        out << YAML::Key << "initial_soc" << YAML::Value << num(b.initial_soc);
        out << YAML::Key << "final_soc" << YAML::Value << num(b.final_soc);
        out << YAML::Key << "min_soc" << YAML::Value << num(b.min_soc);
        out << YAML::Key << "max_soc" << YAML::Value << num(b.max_soc);
        if (!b.alpha_override.empty()) {
            out << YAML::Key << "alpha_per_h" << YAML::Value << YAML::BeginMap;
            for (const auto& [k, v] : b.alpha_override) out << YAML::Key << k << YAML::Value << num(v);
            out << YAML::EndMap;
        }
        out << YAML::Key << "schedule" << YAML::Value << YAML::BeginSeq;
        for (const auto& blk : b.schedule) {
            out << YAML::Flow << YAML::BeginMap;
            out << YAML::Key << "kind" << YAML::Value << std::string(to_string(blk.kind));
            out << YAML::Key << "start" << YAML::Value << format_hhmm(blk.start_min);
            out << YAML::Key << "end" << YAML::Value << format_hhmm(blk.end_min);
            if (blk.kind == BlockKind::on_route)
                out << YAML::Key << "power_kw" << YAML::Value << num(blk.route_power_kw);
            if (!blk.chargers.empty()) {
                out << YAML::Key << "chargers" << YAML::Value << YAML::Flow << YAML::BeginSeq;
                for (const auto& c : blk.chargers) out << c;
                out << YAML::EndSeq;
            }
            out << YAML::EndMap;
        }
        out << YAML::EndSeq << YAML::EndMap;
    }
    out << YAML::EndSeq;

    if (!sc.load_profile.empty()) {
        out << YAML::Key << "load_profile" << YAML::Value << YAML::BeginSeq;
        for (const auto& s : sc.load_profile)
            out << YAML::Flow << YAML::BeginSeq << format_hhmm(s.time_min) << num(s.kwh_per_step) << YAML::EndSeq;
        out << YAML::EndSeq;
    }
    out << YAML::EndMap;
    return std::string(out.c_str()) + "\n";
}

Scenario generate_random_scenario(int n_buses, std::uint64_t seed, const GeneratorBounds& g) {
    if (n_buses < 1) throw ValidationError("n_buses must be >= 1");
    if (g.route_min_lo > g.route_min_hi || g.dwell_min_lo > g.dwell_min_hi ||
        g.power_kw_lo > g.power_kw_hi || g.first_departure_lo > g.first_departure_hi ||
        g.route_min_lo <= 0 || g.dwell_min_lo <= 0)
        throw ValidationError("invalid generator bounds");

    Scenario sc;
    sc.day_start_min = g.day_start;
    sc.day_end_min = g.day_end;
    sc.rates = g.rates;
    if (g.chargers.empty()) {
        ChargerType slow{"slow", (n_buses + 1) / 2, 150.0, 2.0, "station", ChargerClass::slow};
        ChargerType fast{"fast", (n_buses + 3) / 4, 450.0, 3.0, "station", ChargerClass::fast};
        sc.charger_types = {slow, fast};
    } else {
        sc.charger_types = g.chargers;
    }
    std::vector<std::string> all_ids;
    for (const auto& c : sc.charger_types) all_ids.push_back(c.id);

    Rng rng(seed);
    const double end = std::min(g.evening_return, g.day_end);
    for (int j = 0; j < n_buses; ++j) {
        Bus b;
        b.id = "bus" + std::to_string(j + 1);
        b.capacity_kwh = g.capacity_kwh;
        b.eta = g.eta;
        b.initial_soc = g.initial_soc;
        b.final_soc = g.final_soc;
        b.min_soc = g.min_soc;
        b.max_soc = g.max_soc;

        // One route length, dwell and power per bus; integer minutes, 0.01 kW.
        const double route = static_cast<double>(rng.uniform_int(std::llround(g.route_min_lo), std::llround(g.route_min_hi)));
        const double dwell = static_cast<double>(rng.uniform_int(std::llround(g.dwell_min_lo), std::llround(g.dwell_min_hi)));
        const double power = std::round(rng.uniform(g.power_kw_lo, g.power_kw_hi) * 100.0) / 100.0;
        double t = static_cast<double>(
            rng.uniform_int(std::llround(g.first_departure_lo), std::llround(g.first_departure_hi)));
        t = std::max(t, g.day_start);

        if (t > g.day_start) b.schedule.push_back({BlockKind::at_depot, g.day_start, t, {}, 0.0});
        while (t + route <= end) {
            b.schedule.push_back({BlockKind::on_route, t, t + route, {}, power});
            t += route;
            if (t + dwell + route > end) break;
            b.schedule.push_back({BlockKind::in_station, t, t + dwell, all_ids, 0.0});
            t += dwell;
        }
        if (t < g.day_end) b.schedule.push_back({BlockKind::at_depot, t, g.day_end, {}, 0.0});
        sc.buses.push_back(std::move(b));
    }
    validate(sc);
    return sc;
}

}  // namespace beb
