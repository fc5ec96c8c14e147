#include "beb/kernels.hpp"

namespace beb::kernels {

namespace {

void axpy(double a, const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] = y[i] + a * x[i];
}

void infeasibility(const double* x, const double* lo, const double* up, double tol, double* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        double v = 0.0;
        if (x[i] < lo[i] - tol)
            v = lo[i] - x[i];
        else if (x[i] > up[i] + tol)
            v = x[i] - up[i];
        out[i] = v;
    }
}

std::ptrdiff_t argmax_scaled(const double* v, const double* w, std::size_t n) {
    std::ptrdiff_t best = -1;
    double best_score = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (!(v[i] > 0.0)) continue;
        const double s = (v[i] * v[i]) / w[i];
        if (s > best_score) {
            best_score = s;
            best = static_cast<std::ptrdiff_t>(i);
        }
    }
    return best;
}

void dse_update(double* w, const double* alpha, const double* tau, double alpha_r, double w_r, double floor,
                std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        const double r = alpha[i] / alpha_r;
        const double v = (w[i] - 2.0 * (r * tau[i])) + (r * r) * w_r;
        w[i] = v > floor ? v : floor;
    }
}

}  // namespace

const Table& scalar_table() {
    static const Table t{"scalar", axpy, infeasibility, argmax_scaled, dse_update};
    return t;
}

}  // namespace beb::kernels
