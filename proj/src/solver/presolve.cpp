#include <algorithm>
#include <cmath>
#include <map>

#include "beb/errors.hpp"
#include "beb/solver.hpp"

namespace beb::solver {

namespace {

// Merge duplicate indices and drop zero coefficients.
void canonical(Constraint& c) {
    std::map<int, double> acc;
    for (std::size_t t = 0; t < c.idx.size(); ++t) acc[c.idx[t]] += c.coef[t];
    c.idx.clear();
    c.coef.clear();
    for (auto [i, a] : acc)
        if (a != 0.0) {
            c.idx.push_back(i);
            c.coef.push_back(a);
        }
}

void tighten(Variable& v, Relation rel, double bound_from_row, bool upper_side) {
    // upper_side: row says x <= bound (after dividing by the coefficient).
    if (rel == Relation::eq) {
        v.lb = std::max(v.lb, bound_from_row);
        v.ub = std::min(v.ub, bound_from_row);
    } else if (upper_side) {
        v.ub = std::min(v.ub, bound_from_row);
    } else {
        v.lb = std::max(v.lb, bound_from_row);
    }
    if (v.integer) {
        v.lb = std::ceil(v.lb - 1e-9);
        v.ub = std::floor(v.ub + 1e-9);
    }
}

}  // namespace

LpProblem presolve(const MilpModel& model) {
    MilpModel m;
    m.vars = model.vars;
    m.rows.reserve(model.rows.size());

    for (Constraint c : model.rows) {
        canonical(c);
        if (c.idx.size() == 1) {
            const double a = c.coef[0];
            const double b = c.rhs / a;
            // a x <= rhs is x <= b for a > 0 and x >= b for a < 0.
            const bool upper = (c.rel == Relation::le) == (a > 0);
            tighten(m.vars[c.idx[0]], c.rel, b, upper);
            continue;
        }
        if (c.idx.empty()) {
            const bool ok = (c.rel == Relation::le && 0.0 <= c.rhs + 1e-9) ||
                            (c.rel == Relation::ge && 0.0 >= c.rhs - 1e-9) ||
                            (c.rel == Relation::eq && std::abs(c.rhs) <= 1e-9);
            if (!ok) {
                // Keep an unsatisfiable row so the LP reports infeasibility.
                m.rows.push_back(std::move(c));
            }
            continue;
        }
        m.rows.push_back(std::move(c));
    }

    // Strengthen the coefficient of a lone binary indicator in an inequality:
    // rest(y) + a x <= b with a < 0 and max rest = U, b < U < b - a, becomes
    // rest(y) + (b - U) x <= b. Same integer points, tighter relaxation.
    for (auto& c : m.rows) {
        if (c.rel == Relation::eq) continue;
        const double sg = c.rel == Relation::le ? 1.0 : -1.0;
        int bin = -1, n_int = 0;
        for (std::size_t t = 0; t < c.idx.size(); ++t) {
            const auto& v = m.vars[c.idx[t]];
            if (v.integer) {
                ++n_int;
                if (v.lb == 0.0 && v.ub == 1.0) bin = static_cast<int>(t);
            }
        }
        if (n_int != 1 || bin < 0) continue;
        const double a = sg * c.coef[bin];
        const double b = sg * c.rhs;
        if (a >= 0.0) continue;
        double U = 0.0;
        for (std::size_t t = 0; t < c.idx.size(); ++t) {
            if (static_cast<int>(t) == bin) continue;
            const auto& v = m.vars[c.idx[t]];
            const double ct = sg * c.coef[t];
            U += ct > 0 ? ct * v.ub : ct * v.lb;
        }
        if (!std::isfinite(U)) continue;
        const double eps = 1e-9 * std::max(1.0, std::abs(b));
        if (U > b + eps && U < b - a - eps) c.coef[bin] = sg * (b - U);
    }

    return LpProblem::from_model(m);
}

}  // namespace beb::solver
