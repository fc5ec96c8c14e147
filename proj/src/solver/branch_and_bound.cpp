#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <memory>
#include <optional>
#include <queue>
#include <tuple>

#include "beb/solver.hpp"

namespace beb::solver {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kIntTol = 1e-6;

struct Node {
    long id = 0;
    double bound = -kInf;  // parent LP value, model space
    std::vector<std::tuple<int, double, double>> changes;
    std::shared_ptr<const Basis> basis;
};

struct NodeOrder {
    bool operator()(const Node& a, const Node& b) const {
        if (a.bound != b.bound) return a.bound > b.bound;
        return a.id > b.id;
    }
};

}  // namespace

std::string_view to_string(MilpStatus s) {
    switch (s) {
        case MilpStatus::optimal: return "optimal";
        case MilpStatus::feasible_limit: return "feasible_limit";
        case MilpStatus::infeasible: return "infeasible";
        case MilpStatus::unbounded: return "unbounded";
        case MilpStatus::limit_no_incumbent: return "limit_no_incumbent";
    }
    return "?";
}

MilpSolution branch_and_bound(const MilpModel& model, const SolveLimits& limits,
                              const std::vector<double>* incumbent, const BranchOptions& options) {
    using clock = std::chrono::steady_clock;
    const auto t_start = clock::now();
    auto elapsed = [&] { return std::chrono::duration<double>(clock::now() - t_start).count(); };

    MilpSolution sol;
    LpProblem prob = options.presolve ? presolve(model) : LpProblem::from_model(model);
    const int n = prob.n_cols;
    const std::vector<double> root_lb = prob.col_lb, root_ub = prob.col_ub;
    std::vector<int> ints;
    for (int j = 0; j < n; ++j)
        if (model.vars[j].integer) ints.push_back(j);
    DualSimplex lp(std::move(prob));

    std::vector<double> best;
    double inc = kInf;
    double global_bound = -kInf;
    long nodes = 0;

    auto gap_of = [&](double bound) {
        if (!std::isfinite(inc)) return kInf;
        return std::max(0.0, inc - bound) / std::max(1e-9, std::abs(inc));
    };
    auto log = [&](double bound) {
        if (!options.log) return;
        char buf[160];
        std::snprintf(buf, sizeof buf, "%.3f,%ld,%.9g,%.9g,%.6g", elapsed(), nodes, inc, bound, gap_of(bound));
        options.log(buf);
    };
    auto prune_tol = [&] { return std::isfinite(inc) ? std::max(1e-9, limits.gap_tolerance * std::abs(inc)) : 0.0; };

    auto set_bounds = [&](const std::vector<std::tuple<int, double, double>>& changes) {
        for (int j = 0; j < n; ++j) lp.set_col_bounds(j, root_lb[j], root_ub[j]);
        for (const auto& [j, lo, hi] : changes) lp.set_col_bounds(j, lo, hi);
    };

    // Accepts an LP point whose integer entries are integral; polishes when
    // the rounded point fails validation.
    auto offer = [&](std::vector<double> x, const Basis* basis) {
        for (int j : ints) x[j] = std::round(x[j]);
        double z = model.objective(x);
        if (!validate_solution(model, x).pass) {
            std::vector<std::tuple<double, double>> saved;
            for (int j : ints) {
                saved.emplace_back(lp.col_lb(j), lp.col_ub(j));
                lp.set_col_bounds(j, x[j], x[j]);
            }
            LpResult r = lp.solve(basis);
            sol.lp_iterations += r.iterations;
            std::size_t t = 0;
            for (int j : ints) {
                lp.set_col_bounds(j, std::get<0>(saved[t]), std::get<1>(saved[t]));
                ++t;
            }
            if (r.status != LpStatus::optimal) return false;
            x = r.x;
            for (int j : ints) x[j] = std::round(x[j]);
            if (!validate_solution(model, x).pass) return false;
            z = model.objective(x);
        }
        if (z < inc) {
            inc = z;
            best = std::move(x);
            log(global_bound);
            return true;
        }
        return false;
    };

    auto most_fractional = [&](const std::vector<double>& x) {
        int pick = -1;
        double score = kIntTol;
        for (int j : ints) {
            const double f = x[j] - std::floor(x[j]);
            const double s = std::min(f, 1.0 - f);
            if (s > score) {
                score = s;
                pick = j;
            }
        }
        return pick;
    };

    if (incumbent && static_cast<int>(incumbent->size()) == n && validate_solution(model, *incumbent).pass) {
        best = *incumbent;
        inc = model.objective(best);
        log(global_bound);
    }

    LpResult root = lp.solve();
    sol.lp_iterations += root.iterations;
    bool incomplete = false;
    std::priority_queue<Node, std::vector<Node>, NodeOrder> open;
    long next_id = 0;

    auto finish = [&](MilpStatus st) {
        sol.status = st;
        sol.x = best;
        sol.objective = std::isfinite(inc) ? inc : 0.0;
        sol.nodes_explored = nodes;
        sol.wall_time_s = elapsed();
        sol.best_bound = global_bound;
        sol.gap = gap_of(global_bound);
        return sol;
    };

    if (root.status == LpStatus::infeasible) {
        global_bound = kInf;
        return finish(std::isfinite(inc) ? MilpStatus::feasible_limit : MilpStatus::infeasible);
    }
    if (root.status == LpStatus::unbounded) return finish(MilpStatus::unbounded);
    if (root.status != LpStatus::optimal) {
        return finish(std::isfinite(inc) ? MilpStatus::feasible_limit : MilpStatus::limit_no_incumbent);
    }
    global_bound = root.objective + model.obj_offset;
    log(global_bound);

    // Depth-first rounding dive from the root for a first incumbent. Each
    // level fixes the variable closest to integral, nearer value first; a
    // dead end flips the deepest level whose other value is untried.
    if (options.dive && !std::isfinite(inc) && most_fractional(root.x) >= 0) {
        struct Level {
            int var;
            double other;
            bool flipped;
            std::shared_ptr<Basis> basis;  // before this level's fix
        };
        std::vector<Level> stack;
        std::vector<std::tuple<int, double, double>> fixes;
        std::vector<double> x = root.x;
        auto basis = std::make_shared<Basis>(root.basis);
        long lps = 0;
        auto try_fix = [&](int j, double v, const std::shared_ptr<Basis>& from) {
            fixes.emplace_back(j, v, v);
            set_bounds(fixes);
            LpResult r = lp.solve(from.get());
            sol.lp_iterations += r.iterations;
            ++lps;
            if (r.status == LpStatus::optimal &&
                !(std::isfinite(inc) && r.objective + model.obj_offset >= inc - prune_tol())) {
                x = std::move(r.x);
                basis = std::make_shared<Basis>(std::move(r.basis));
                return true;
            }
            fixes.pop_back();
            return false;
        };
        while (lps < options.dive_max_lps && elapsed() <= limits.time_limit_s) {
            int pick = -1;
            double closest = 2.0;
            for (int j : ints) {
                const double f = x[j] - std::floor(x[j]);
                const double sc = std::min(f, 1.0 - f);
                if (sc > kIntTol && sc < closest) {
                    closest = sc;
                    pick = j;
                }
            }
            if (pick < 0) {
                offer(x, basis.get());
                break;
            }
            const double near = std::round(x[pick]);
            const double far = x[pick] < near ? std::floor(x[pick]) : std::ceil(x[pick]);
            const auto before = basis;
            if (try_fix(pick, near, before)) {
                stack.push_back({pick, far, false, before});
                continue;
            }
            if (try_fix(pick, far, before)) {
                stack.push_back({pick, near, true, before});
                continue;
            }
            // Backtrack.
            bool resumed = false;
            while (!stack.empty() && !resumed && lps < options.dive_max_lps) {
                Level lv = stack.back();
                stack.pop_back();
                fixes.pop_back();
                if (lv.flipped) continue;
                if (try_fix(lv.var, lv.other, lv.basis)) {
                    stack.push_back({lv.var, lv.other, true, lv.basis});
                    resumed = true;
                }
            }
            if (!resumed) break;
        }
        set_bounds({});
    }

    std::optional<Node> next;
    {
        Node r;
        r.id = next_id++;
        r.bound = global_bound;
        r.basis = std::make_shared<Basis>(root.basis);
        next = std::move(r);
    }
    bool root_done = false;

    while (next || !open.empty()) {
        global_bound = next ? next->bound : kInf;
        if (!open.empty()) global_bound = std::min(global_bound, open.top().bound);
        if (std::isfinite(inc) && gap_of(global_bound) <= limits.gap_tolerance) break;
        if (nodes >= limits.node_limit || elapsed() > limits.time_limit_s) {
            return finish(std::isfinite(inc) ? MilpStatus::feasible_limit : MilpStatus::limit_no_incumbent);
        }

        Node node;
        if (next) {
            node = std::move(*next);
            next.reset();
        } else {
            node = open.top();
            open.pop();
        }
        if (std::isfinite(inc) && node.bound >= inc - prune_tol()) continue;
        ++nodes;

        LpResult r;
        if (!root_done) {
            r = std::move(root);
            root_done = true;
        } else {
            set_bounds(node.changes);
            r = lp.solve(node.basis.get());
            sol.lp_iterations += r.iterations;
        }
        if (r.status == LpStatus::infeasible) continue;
        if (r.status != LpStatus::optimal) {
            incomplete = true;
            continue;
        }
        const double z = r.objective + model.obj_offset;
        if (std::isfinite(inc) && z >= inc - prune_tol()) continue;

        const int j = most_fractional(r.x);
        if (j < 0) {
            offer(r.x, &r.basis);
            continue;
        }
        const double v = r.x[j];
        auto basis = std::make_shared<Basis>(std::move(r.basis));
        const auto cur_lo = [&] {
            for (auto it = node.changes.rbegin(); it != node.changes.rend(); ++it)
                if (std::get<0>(*it) == j) return std::make_pair(std::get<1>(*it), std::get<2>(*it));
            return std::make_pair(root_lb[j], root_ub[j]);
        }();
        Node down, up;
        down.changes = node.changes;
        down.changes.emplace_back(j, cur_lo.first, std::floor(v));
        up.changes = std::move(node.changes);
        up.changes.emplace_back(j, std::ceil(v), cur_lo.second);
        down.bound = up.bound = z;
        down.basis = up.basis = basis;
        down.id = next_id++;
        up.id = next_id++;
        // Plunge toward the nearer rounding.
        if (v - std::floor(v) >= 0.5) {
            next = std::move(up);
            open.push(std::move(down));
        } else {
            next = std::move(down);
            open.push(std::move(up));
        }
    }

    if (!std::isfinite(inc)) {
        global_bound = kInf;
        return finish(incomplete ? MilpStatus::limit_no_incumbent : MilpStatus::infeasible);
    }
    if (!next && open.empty()) global_bound = incomplete ? std::min(global_bound, inc) : inc;
    global_bound = std::min(global_bound, inc);
    log(global_bound);
    return finish(incomplete ? MilpStatus::feasible_limit : MilpStatus::optimal);
}

}  // namespace beb::solver
