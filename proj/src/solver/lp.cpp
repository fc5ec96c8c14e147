#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <utility>

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include "beb/kernels.hpp"
#include "beb/solver.hpp"

namespace beb::solver {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kBox = 1e7;          // stand-in for an infinite bound
constexpr double kPivotTol = 1e-9;    // smallest usable pivot-row entry
constexpr double kWeightFloor = 1e-8;
constexpr int kRefactorEvery = 64;

constexpr std::uint8_t kBasic = 0, kAtLower = 1, kAtUpper = 2;

// Deterministic value in [0, 1) per index, for the cost perturbation.
double hash_unit(std::uint64_t i) {
    std::uint64_t z = i * 0x9E3779B97F4A7C15ull + 0x632BE59BD9B4E019ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    z ^= z >> 31;
    return static_cast<double>(z >> 11) * 0x1.0p-53;
}

struct Eta {
    int r = 0;
    double pivot = 1.0;
    std::vector<std::pair<int, double>> entries;  // i != r
};

}  // namespace

std::string_view to_string(LpStatus s) {
    switch (s) {
        case LpStatus::optimal: return "optimal";
        case LpStatus::infeasible: return "infeasible";
        case LpStatus::unbounded: return "unbounded";
        case LpStatus::iteration_limit: return "iteration_limit";
        case LpStatus::numerical: return "numerical";
    }
    return "?";
}

LpProblem LpProblem::from_model(const MilpModel& model) {
    LpProblem p;
    p.n_cols = model.n_vars();
    p.n_rows = model.n_rows();
    p.obj.resize(p.n_cols);
    p.col_lb.resize(p.n_cols);
    p.col_ub.resize(p.n_cols);
    p.integer.resize(p.n_cols);
    for (int j = 0; j < p.n_cols; ++j) {
        const auto& v = model.vars[j];
        p.obj[j] = v.obj;
        p.col_lb[j] = v.lb;
        p.col_ub[j] = v.ub;
        p.integer[j] = v.integer ? 1 : 0;
    }
    std::vector<std::vector<std::pair<int, double>>> cols(p.n_cols);
    p.row_lb.resize(p.n_rows);
    p.row_ub.resize(p.n_rows);
    for (int i = 0; i < p.n_rows; ++i) {
        const auto& r = model.rows[i];
        p.row_lb[i] = r.rel == Relation::le ? -kInf : r.rhs;
        p.row_ub[i] = r.rel == Relation::ge ? kInf : r.rhs;
        for (std::size_t t = 0; t < r.idx.size(); ++t) cols[r.idx[t]].emplace_back(i, r.coef[t]);
    }
    p.col_start.assign(p.n_cols + 1, 0);
    for (int j = 0; j < p.n_cols; ++j) {
        auto& c = cols[j];
        std::sort(c.begin(), c.end());
        for (std::size_t t = 0; t < c.size(); ++t) {
            if (!p.row_index.empty() && static_cast<int>(p.row_index.size()) > p.col_start[j] &&
                p.row_index.back() == c[t].first) {
                p.value.back() += c[t].second;
                continue;
            }
            p.row_index.push_back(c[t].first);
            p.value.push_back(c[t].second);
        }
        p.col_start[j + 1] = static_cast<int>(p.row_index.size());
    }
    return p;
}

struct DualSimplex::Impl {
    LpProblem P;
    LpOptions opt;
    const kernels::Table& kt = kernels::active();
    int n = 0, m = 0, N = 0;

    std::vector<double> user_lb, user_ub;  // structural bounds as set by the caller
    std::vector<double> lb, ub;            // working boxes, size N
    std::vector<std::uint8_t> art_lb, art_ub;
    std::vector<double> cost;  // working costs, size N
    std::vector<std::uint8_t> status;
    std::vector<int> head, pos;
    std::vector<double> x;  // nonbasic values (basic entries stale)
    std::vector<double> xB, lbB, ubB, w;
    std::vector<double> d;

    mutable Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
    std::vector<Eta> etas;
    long iterations = 0;

    Impl(LpProblem p, LpOptions o) : P(std::move(p)), opt(o) {
        n = P.n_cols;
        m = P.n_rows;
        N = n + m;
        user_lb = P.col_lb;
        user_ub = P.col_ub;
    }

    // ---- linear algebra -------------------------------------------------

    template <class F>
    void for_col(int j, F&& f) const {
        if (j < n) {
            for (int t = P.col_start[j]; t < P.col_start[j + 1]; ++t) f(P.row_index[t], P.value[t]);
        } else {
            f(j - n, -1.0);
        }
    }

    bool factor() {
        std::vector<Eigen::Triplet<double>> trip;
        trip.reserve(static_cast<std::size_t>(m) * 3);
        for (int r = 0; r < m; ++r) for_col(head[r], [&](int i, double v) { trip.emplace_back(i, r, v); });
        Eigen::SparseMatrix<double> B(m, m);
        B.setFromTriplets(trip.begin(), trip.end());
        B.makeCompressed();
        etas.clear();
        if (m == 0) return true;
        lu.analyzePattern(B);
        lu.factorize(B);
        if (lu.info() != Eigen::Success) return false;
        // SparseLU does not flag tiny pivots; reject bases it cannot reproduce.
        Eigen::VectorXd probe = Eigen::VectorXd::Ones(m);
        Eigen::VectorXd sol = lu.solve(probe);
        if (!sol.allFinite()) return false;
        Eigen::VectorXd back = B * sol;
        return (back - probe).lpNorm<Eigen::Infinity>() < 1e-6;
    }

    void ftran(Eigen::VectorXd& y) const {
        if (m == 0) return;
        y = lu.solve(y).eval();
        for (const auto& e : etas) {
            const double yr = y[e.r] / e.pivot;
            y[e.r] = yr;
            if (yr != 0.0)
                for (const auto& [i, a] : e.entries) y[i] -= a * yr;
        }
    }

    void btran(Eigen::VectorXd& y) const {
        if (m == 0) return;
        for (auto it = etas.rbegin(); it != etas.rend(); ++it) {
            double s = y[it->r];
            for (const auto& [i, a] : it->entries) s -= a * y[i];
            y[it->r] = s / it->pivot;
        }
        y = lu.transpose().solve(y).eval();
    }

    // ---- bookkeeping ------------------------------------------------------

    void setup_boxes() {
        lb.assign(N, 0.0);
        ub.assign(N, 0.0);
        art_lb.assign(N, 0);
        art_ub.assign(N, 0);
        for (int j = 0; j < n; ++j) {
            lb[j] = user_lb[j];
            ub[j] = user_ub[j];
        }
        // Logical bounds: row range intersected with the implied activity range.
        std::vector<double> act_lo(m, 0.0), act_hi(m, 0.0);
        for (int j = 0; j < n; ++j)
            for (int t = P.col_start[j]; t < P.col_start[j + 1]; ++t) {
                const int i = P.row_index[t];
                const double a = P.value[t];
                if (a > 0) {
                    act_lo[i] += a * lb[j];
                    act_hi[i] += a * ub[j];
                } else if (a < 0) {
                    act_lo[i] += a * ub[j];
                    act_hi[i] += a * lb[j];
                }
            }
        for (int i = 0; i < m; ++i) {
            double lo = P.row_lb[i], hi = P.row_ub[i];
            if (std::isfinite(act_lo[i])) lo = std::max(lo, act_lo[i]);
            if (std::isfinite(act_hi[i])) hi = std::min(hi, act_hi[i]);
            lb[n + i] = lo;
            ub[n + i] = hi;
        }
        for (int j = 0; j < N; ++j) {
            if (!std::isfinite(lb[j])) {
                lb[j] = -kBox;
                art_lb[j] = 1;
            }
            if (!std::isfinite(ub[j])) {
                ub[j] = kBox;
                art_ub[j] = 1;
            }
        }
    }

    double value_at(int j, std::uint8_t st) const { return st == kAtUpper ? ub[j] : lb[j]; }

    void compute_primal() {
        Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m);
        for (int j = 0; j < N; ++j) {
            if (status[j] == kBasic) continue;
            x[j] = value_at(j, status[j]);
            if (x[j] != 0.0) for_col(j, [&](int i, double a) { rhs[i] -= a * x[j]; });
        }
        ftran(rhs);
        for (int r = 0; r < m; ++r) {
            xB[r] = rhs[r];
            lbB[r] = lb[head[r]];
            ubB[r] = ub[head[r]];
        }
    }

    void compute_duals(Eigen::VectorXd& y) {
        y.setZero(m);
        for (int r = 0; r < m; ++r) y[r] = cost[head[r]];
        btran(y);
        for (int j = 0; j < N; ++j) {
            if (status[j] == kBasic) {
                d[j] = 0.0;
                continue;
            }
            double s = cost[j];
            for_col(j, [&](int i, double a) { s -= a * y[i]; });
            d[j] = s;
        }
    }

    // Move dual-infeasible nonbasics to the other bound. Returns whether any moved.
    bool repair_dual(double tol) {
        bool moved = false;
        for (int j = 0; j < N; ++j) {
            if (status[j] == kBasic || lb[j] == ub[j]) continue;
            if (status[j] == kAtLower && d[j] < -tol) {
                status[j] = kAtUpper;
                moved = true;
            } else if (status[j] == kAtUpper && d[j] > tol) {
                status[j] = kAtLower;
                moved = true;
            }
        }
        return moved;
    }

    void cold_basis() {
        status.assign(N, kAtLower);
        head.resize(m);
        for (int i = 0; i < m; ++i) {
            head[i] = n + i;
            status[n + i] = kBasic;
        }
        for (int j = 0; j < n; ++j) status[j] = cost[j] >= 0 ? kAtLower : kAtUpper;
        w.assign(m, 1.0);
    }

    void rebuild_pos() {
        pos.assign(N, -1);
        for (int r = 0; r < m; ++r) pos[head[r]] = r;
    }

    bool adopt(const Basis& b) {
        if (static_cast<int>(b.head.size()) != m || static_cast<int>(b.status.size()) != N) return false;
        head = b.head;
        status = b.status;
        int nb = 0;
        for (int j = 0; j < N; ++j) nb += status[j] == kBasic;
        if (nb != m) return false;
        for (int r = 0; r < m; ++r)
            if (head[r] < 0 || head[r] >= N || status[head[r]] != kBasic) return false;
        if (static_cast<int>(b.weights.size()) == m)
            w = b.weights;
        else
            w.assign(m, 1.0);
        return true;
    }

    // Rebuild factors, primal and dual values from scratch; keeps dual feasibility.
    bool reinvert(Eigen::VectorXd& y, double dual_tol) {
        if (!factor()) return false;
        compute_duals(y);
        repair_dual(dual_tol);
        compute_primal();
        return true;
    }

    // ---- main loop --------------------------------------------------------

    LpResult solve(const Basis* warm) {
        LpResult res;
        iterations = 0;
        setup_boxes();
        for (int j = 0; j < N; ++j)
            if (lb[j] > ub[j] + 1e-9) {
                res.status = LpStatus::infeasible;
                return res;
            } else if (lb[j] > ub[j]) {
                ub[j] = lb[j];
            }

        cost.assign(N, 0.0);
        for (int j = 0; j < n; ++j) cost[j] = P.obj[j];
        x.assign(N, 0.0);
        xB.assign(m, 0.0);
        lbB.assign(m, 0.0);
        ubB.assign(m, 0.0);
        d.assign(N, 0.0);

        if (!(warm && adopt(*warm))) cold_basis();
        for (int j = 0; j < N; ++j)
            if (status[j] == kAtUpper && lb[j] == ub[j]) status[j] = kAtLower;
        rebuild_pos();
        Eigen::VectorXd y(m);
        if (!factor()) {
            cold_basis();
            rebuild_pos();
            if (!factor()) {
                res.status = LpStatus::numerical;
                return res;
            }
        }

        // Perturb costs toward the side each nonbasic sits on.
        bool perturbed = false;
        if (opt.perturb) {
            compute_duals(y);
            repair_dual(0.0);
            for (int j = 0; j < n; ++j) {
                if (lb[j] == ub[j]) continue;
                const double mag = (1e-7 + 1e-6 * std::abs(P.obj[j])) * (0.5 + 0.5 * hash_unit(j));
                if (status[j] == kAtLower)
                    cost[j] += mag;
                else if (status[j] == kAtUpper)
                    cost[j] -= mag;
            }
            perturbed = true;
        }
        compute_duals(y);
        repair_dual(0.0);
        compute_primal();

        const long limit = opt.iteration_limit > 0 ? opt.iteration_limit : 50L * (N + 100);
        std::vector<double> infeas(m), alpha_row(N), col_dense(m), tau_dense(m);
        std::vector<std::pair<double, int>> cands;
        std::vector<int> flips;
        LpStatus st = LpStatus::iteration_limit;
        bool retried = false;

        while (true) {
            if (iterations >= limit) break;
            if (static_cast<int>(etas.size()) >= kRefactorEvery) {
                if (!reinvert(y, opt.dual_tol)) {
                    st = LpStatus::numerical;
                    break;
                }
            }

            // Pricing.
            kt.infeasibility(xB.data(), lbB.data(), ubB.data(), opt.primal_tol, infeas.data(), m);
            const std::ptrdiff_t pr = kt.argmax_scaled(infeas.data(), w.data(), m);
            if (pr < 0) {
                if (perturbed) {
                    // Drop the perturbation; any dual infeasibility is fixed by flips.
                    for (int j = 0; j < n; ++j) cost[j] = P.obj[j];
                    perturbed = false;
                    if (!reinvert(y, opt.dual_tol)) {
                        st = LpStatus::numerical;
                        break;
                    }
                    continue;
                }
                st = LpStatus::optimal;
                break;
            }
            const int r = static_cast<int>(pr);
            const int leave = head[r];
            const bool to_lower = xB[r] < lbB[r];
            const double sgn = to_lower ? -1.0 : 1.0;  // sign of delta

            // Pivot row.
            Eigen::VectorXd rho = Eigen::VectorXd::Zero(m);
            rho[r] = 1.0;
            btran(rho);
            cands.clear();
            for (int j = 0; j < N; ++j) {
                alpha_row[j] = 0.0;
                if (status[j] == kBasic) continue;
                double a = 0.0;
                if (j < n) {
                    for (int t = P.col_start[j]; t < P.col_start[j + 1]; ++t) a += P.value[t] * rho[P.row_index[t]];
                } else {
                    a = -rho[j - n];
                }
                alpha_row[j] = a;
                if (lb[j] == ub[j]) continue;
                const double at = sgn * a;
                if (status[j] == kAtLower && at > kPivotTol)
                    cands.emplace_back(std::max(0.0, d[j]) / at, j);
                else if (status[j] == kAtUpper && at < -kPivotTol)
                    cands.emplace_back(std::max(0.0, -d[j]) / -at, j);
            }
            std::sort(cands.begin(), cands.end());

            // Bound-flipping ratio test with a Harris-style pick at the break point.
            double slope = to_lower ? lbB[r] - xB[r] : xB[r] - ubB[r];
            flips.clear();
            int enter = -1;
            double step = 0.0;
            for (std::size_t i = 0; i < cands.size(); ++i) {
                const int j = cands[i].second;
                const double aa = std::abs(alpha_row[j]);
                const double after = slope - aa * (ub[j] - lb[j]);
                if (after > 0.0) {
                    slope = after;
                    flips.push_back(j);
                    continue;
                }
                double t_harris = kInf;
                double best = -1.0;
                for (std::size_t k = i; k < cands.size(); ++k) {
                    const int jk = cands[k].second;
                    const double ak = std::abs(alpha_row[jk]);
                    if (cands[k].first > t_harris) break;
                    t_harris = std::min(t_harris, cands[k].first + opt.dual_tol / ak);
                    if (ak > best) {
                        best = ak;
                        enter = jk;
                        step = cands[k].first;
                    }
                }
                break;
            }
            if (enter < 0) {
                st = LpStatus::infeasible;
                break;
            }

            // Entering column.
            Eigen::VectorXd col = Eigen::VectorXd::Zero(m);
            for_col(enter, [&](int i, double a) { col[i] = a; });
            ftran(col);
            const double arq = col[r];
            if (std::abs(arq - alpha_row[enter]) > 1e-7 * (1.0 + std::abs(arq)) || std::abs(arq) < kPivotTol) {
                if (!etas.empty() && !retried) {
                    retried = true;
                    if (!reinvert(y, opt.dual_tol)) {
                        st = LpStatus::numerical;
                        break;
                    }
                    continue;
                }
                if (std::abs(arq) < kPivotTol) {
                    st = LpStatus::numerical;
                    break;
                }
            }
            retried = false;

            // Dual update.
            const double t_dual = step;
            if (t_dual != 0.0) kt.axpy(-t_dual * sgn, alpha_row.data(), d.data(), N);
            d[enter] = 0.0;
            d[leave] = -sgn * t_dual;

            // Bound flips.
            if (!flips.empty()) {
                Eigen::VectorXd delta = Eigen::VectorXd::Zero(m);
                for (int j : flips) {
                    const std::uint8_t ns = status[j] == kAtLower ? kAtUpper : kAtLower;
                    const double dx = value_at(j, ns) - x[j];
                    status[j] = ns;
                    x[j] = value_at(j, ns);
                    for_col(j, [&](int i, double a) { delta[i] -= a * dx; });
                }
                ftran(delta);
                for (int i = 0; i < m; ++i) xB[i] += delta[i];
            }

            // Primal step.
            const double target = to_lower ? lbB[r] : ubB[r];
            const double theta = (xB[r] - target) / arq;
            for (int i = 0; i < m; ++i) col_dense[i] = col[i];
            kt.axpy(-theta, col_dense.data(), xB.data(), m);
            const double x_enter = x[enter] + theta;

            // Steepest-edge weights.
            Eigen::VectorXd tau = rho;
            ftran(tau);
            for (int i = 0; i < m; ++i) tau_dense[i] = tau[i];
            const double wr = w[r];
            kt.dse_update(w.data(), col_dense.data(), tau_dense.data(), arq, wr, kWeightFloor, m);
            w[r] = std::max(wr / (arq * arq), kWeightFloor);

            // Basis change.
            status[leave] = to_lower ? kAtLower : kAtUpper;
            x[leave] = target;
            status[enter] = kBasic;
            head[r] = enter;
            pos[enter] = r;
            pos[leave] = -1;
            xB[r] = x_enter;
            lbB[r] = lb[enter];
            ubB[r] = ub[enter];

            Eta e;
            e.r = r;
            e.pivot = arq;
            for (int i = 0; i < m; ++i)
                if (i != r && col[i] != 0.0) e.entries.emplace_back(i, col[i]);
            etas.push_back(std::move(e));
            ++iterations;
        }

        // Report in terms of the original costs.
        for (int j = 0; j < n; ++j) cost[j] = P.obj[j];
        if (st != LpStatus::numerical) {
            if (factor()) {
                compute_duals(y);
                compute_primal();
            } else {
                st = LpStatus::numerical;
            }
        }
        res.status = st;
        res.iterations = iterations;
        for (int r = 0; r < m; ++r) x[head[r]] = xB[r];
        res.x.assign(x.begin(), x.begin() + n);
        res.row_act.assign(m, 0.0);
        for (int j = 0; j < n; ++j)
            for (int t = P.col_start[j]; t < P.col_start[j + 1]; ++t) res.row_act[P.row_index[t]] += P.value[t] * x[j];
        res.duals.assign(y.data(), y.data() + m);
        res.reduced.assign(d.begin(), d.begin() + n);
        double obj = 0.0;
        for (int j = 0; j < n; ++j) obj += P.obj[j] * x[j];
        res.objective = obj;

        double pres = 0.0;
        for (int j = 0; j < n; ++j) pres = std::max({pres, user_lb[j] - x[j], x[j] - user_ub[j]});
        for (int i = 0; i < m; ++i) pres = std::max({pres, P.row_lb[i] - res.row_act[i], res.row_act[i] - P.row_ub[i]});
        double dres = 0.0;
        for (int j = 0; j < N; ++j) {
            if (status[j] == kBasic || lb[j] == ub[j]) continue;
            if (status[j] == kAtLower) dres = std::max(dres, -d[j]);
            if (status[j] == kAtUpper) dres = std::max(dres, d[j]);
        }
        res.primal_residual = pres;
        res.dual_residual = dres;

        if (st == LpStatus::optimal) {
            for (int j = 0; j < N; ++j) {
                const double v = x[j];
                if ((art_lb[j] && v <= -0.5 * kBox) || (art_ub[j] && v >= 0.5 * kBox)) {
                    res.status = LpStatus::unbounded;
                    break;
                }
            }
        }
        res.basis.head = head;
        res.basis.status = status;
        res.basis.weights = w;
        return res;
    }
};

DualSimplex::DualSimplex(LpProblem problem, LpOptions options)
    : impl_(std::make_unique<Impl>(std::move(problem), options)) {}
DualSimplex::~DualSimplex() = default;

const LpProblem& DualSimplex::problem() const { return impl_->P; }

void DualSimplex::set_col_bounds(int j, double lb, double ub) {
    impl_->user_lb[j] = lb;
    impl_->user_ub[j] = ub;
}
double DualSimplex::col_lb(int j) const { return impl_->user_lb[j]; }
double DualSimplex::col_ub(int j) const { return impl_->user_ub[j]; }

LpResult DualSimplex::solve(const Basis* warm) { return impl_->solve(warm); }

LpResult solve_lp(const MilpModel& model, const LpOptions& options) {
    DualSimplex lp(LpProblem::from_model(model), options);
    LpResult r = lp.solve();
    if (r.status == LpStatus::optimal) r.objective += model.obj_offset;
    return r;
}

}  // namespace beb::solver
