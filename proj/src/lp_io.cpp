#include <algorithm>
#include <cctype>
#include <cmath>
#include <sstream>
#include <unordered_map>

#include "beb/errors.hpp"
#include "beb/format.hpp"
#include "beb/milp.hpp"

namespace beb {

namespace {

// Writes "+ c name" terms, wrapping well below the 255-character LP line limit.
void write_terms(std::ostringstream& out, std::size_t& col, const std::vector<std::pair<double, std::string>>& terms) {
    for (const auto& [c, name] : terms) {
        std::string t = (c < 0 ? " - " : " + ") + fmt_num(std::abs(c)) + " " + name;
        if (col + t.size() > 100) {
            out << "\n  ";
            col = 2;
        }
        out << t;
        col += t.size();
    }
}

std::string rel_str(Relation r) {
    switch (r) {
        case Relation::le: return "<=";
        case Relation::ge: return ">=";
        case Relation::eq: return "=";
    }
    return "=";
}

std::string bound_str(double v) {
    if (std::isinf(v)) return v > 0 ? "+inf" : "-inf";
    return fmt_num(v);
}

}  // namespace

std::string export_lp(const MilpModel& m) {
    std::ostringstream out;
    out << "\\ bebsched model: " << m.n_vars() << " variables, " << m.n_rows() << " constraints\n";
    if (m.obj_offset != 0.0) out << "\\ objective offset: " << fmt_num(m.obj_offset) << "\n";
    out << "Minimize\n obj:";
    std::size_t col = 5;
    std::vector<std::pair<double, std::string>> terms;
    for (const auto& v : m.vars)
        if (v.obj != 0.0) terms.emplace_back(v.obj, v.name);
    write_terms(out, col, terms);
    out << "\n";

    if (!m.rows.empty()) {
        out << "Subject To\n";
        for (const auto& r : m.rows) {
            out << " " << r.name << ":";
            col = r.name.size() + 2;
            terms.clear();
            for (std::size_t t = 0; t < r.idx.size(); ++t) terms.emplace_back(r.coef[t], m.vars[r.idx[t]].name);
            if (terms.empty()) terms.emplace_back(0.0, m.vars.empty() ? "x" : m.vars[0].name);
            write_terms(out, col, terms);
            out << " " << rel_str(r.rel) << " " << fmt_num(r.rhs) << "\n";
        }
    }
    if (!m.vars.empty()) {
        out << "Bounds\n";
        for (const auto& v : m.vars) {
            if (v.lb == v.ub)
                out << " " << v.name << " = " << fmt_num(v.lb) << "\n";
            else if (std::isinf(v.lb) && std::isinf(v.ub))
                out << " " << v.name << " free\n";
            else
                out << " " << bound_str(v.lb) << " <= " << v.name << " <= " << bound_str(v.ub) << "\n";
        }
        bool any_int = std::any_of(m.vars.begin(), m.vars.end(), [](const Variable& v) { return v.integer; });
        if (any_int) {
            out << "Generals\n";
            col = 0;
            for (const auto& v : m.vars) {
                if (!v.integer) continue;
                if (col + v.name.size() > 100) {
                    out << "\n";
                    col = 0;
                }
                out << " " << v.name;
                col += v.name.size() + 1;
            }
            out << "\n";
        }
    }
    out << "End\n";
    return out.str();
}

LpDocument read_lp(const std::string& text) {
    LpDocument doc;
    std::unordered_map<std::string, int> index;
    auto var = [&](const std::string& name) {
        auto it = index.find(name);
        if (it != index.end()) return it->second;
        const int i = static_cast<int>(doc.var_names.size());
        index.emplace(name, i);
        doc.var_names.push_back(name);
        doc.obj.push_back(0.0);
        doc.lb.push_back(0.0);
        doc.ub.push_back(INFINITY);
        doc.integer.push_back(false);
        return i;
    };

    enum class Sec { none, obj, rows, bounds, generals, end } sec = Sec::none;
    std::vector<std::string> tokens;
    std::vector<Sec> token_sec;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (line.rfind("\\ objective offset:", 0) == 0) {
            doc.obj_offset = std::stod(line.substr(19));
            continue;
        }
        if (!line.empty() && line[0] == '\\') continue;
        std::string lower = line;
        std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
        if (lower == "minimize") { sec = Sec::obj; continue; }
        if (lower == "subject to") { sec = Sec::rows; continue; }
        if (lower == "bounds") { sec = Sec::bounds; continue; }
        if (lower == "generals") { sec = Sec::generals; continue; }
        if (lower == "end") { sec = Sec::end; continue; }
        if (sec == Sec::bounds) {
            // One bound statement per line.
            std::istringstream ls(line);
            std::vector<std::string> t;
            for (std::string w; ls >> w;) t.push_back(w);
            auto num = [](const std::string& s) -> double {
                if (s == "+inf" || s == "inf") return INFINITY;
                if (s == "-inf") return -INFINITY;
                return std::stod(s);
            };
            if (t.size() == 2 && t[1] == "free") {
                const int i = var(t[0]);
                doc.lb[i] = -INFINITY;
                doc.ub[i] = INFINITY;
            } else if (t.size() == 3 && t[1] == "=") {
                const int i = var(t[0]);
                doc.lb[i] = doc.ub[i] = num(t[2]);
            } else if (t.size() == 5 && t[1] == "<=" && t[3] == "<=") {
                const int i = var(t[2]);
                doc.lb[i] = num(t[0]);
                doc.ub[i] = num(t[4]);
            } else if (!t.empty()) {
                throw ParseError("bounds", "unsupported bound line '" + line + "'");
            }
            continue;
        }
        std::istringstream ls(line);
        for (std::string w; ls >> w;) {
            tokens.push_back(w);
            token_sec.push_back(sec);
        }
    }

    // Objective and rows: [name:] {[+|-] coef name} [rel rhs]
    std::size_t i = 0;
    auto parse_terms = [&](Sec s, std::vector<std::pair<int, double>>& terms) {
        double sign = 1.0;
        while (i < tokens.size() && token_sec[i] == s) {
            const std::string& t = tokens[i];
            if (t.back() == ':' || t == "<=" || t == ">=" || t == "=") return;
            if (t == "+") { sign = 1.0; ++i; continue; }
            if (t == "-") { sign = -1.0; ++i; continue; }
            double c = 1.0;
            char* endp = nullptr;
            const double v = std::strtod(t.c_str(), &endp);
            if (endp && *endp == '\0') {
                c = v;
                ++i;
            }
            if (i >= tokens.size()) throw ParseError("lp", "dangling coefficient");
            terms.emplace_back(var(tokens[i]), sign * c);
            sign = 1.0;
            ++i;
        }
    };
    while (i < tokens.size()) {
        const Sec s = token_sec[i];
        if (s == Sec::generals) {
            doc.integer[var(tokens[i])] = true;
            ++i;
            continue;
        }
        std::string name;
        if (tokens[i].back() == ':') {
            name = tokens[i].substr(0, tokens[i].size() - 1);
            ++i;
        }
        std::vector<std::pair<int, double>> terms;
        parse_terms(s, terms);
        if (s == Sec::obj) {
            for (auto [v, c] : terms) doc.obj[v] += c;
            continue;
        }
        if (s != Sec::rows) throw ParseError("lp", "unexpected token '" + tokens[i] + "'");
        if (i + 1 >= tokens.size()) throw ParseError("lp", "row " + name + " has no right-hand side");
        LpDocument::Row r;
        r.name = name;
        r.rel = tokens[i] == "<=" ? Relation::le : tokens[i] == ">=" ? Relation::ge : Relation::eq;
        r.rhs = std::stod(tokens[i + 1]);
        i += 2;
        // Drop placeholder zero terms written for empty rows.
        for (auto [v, c] : terms)
            if (c != 0.0) r.terms.emplace_back(v, c);
        doc.rows.push_back(std::move(r));
    }
    return doc;
}

}  // namespace beb
