#include "beb/kernels.hpp"

#if defined(__aarch64__) && defined(__ARM_NEON)
#include <arm_neon.h>

namespace beb::kernels {

namespace {

void axpy(double a, const double* x, double* y, std::size_t n) {
    const float64x2_t va = vdupq_n_f64(a);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) vst1q_f64(y + i, vaddq_f64(vld1q_f64(y + i), vmulq_f64(va, vld1q_f64(x + i))));
    for (; i < n; ++i) y[i] = y[i] + a * x[i];
}

void infeasibility(const double* x, const double* lo, const double* up, double tol, double* out, std::size_t n) {
    const float64x2_t vt = vdupq_n_f64(tol);
    const float64x2_t zero = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const float64x2_t vx = vld1q_f64(x + i), vl = vld1q_f64(lo + i), vu = vld1q_f64(up + i);
        const uint64x2_t below = vcltq_f64(vx, vsubq_f64(vl, vt));
        const uint64x2_t above = vcgtq_f64(vx, vaddq_f64(vu, vt));
        float64x2_t v = vbslq_f64(above, vsubq_f64(vx, vu), zero);
        v = vbslq_f64(below, vsubq_f64(vl, vx), v);
        vst1q_f64(out + i, v);
    }
    for (; i < n; ++i) {
        double v = 0.0;
        if (x[i] < lo[i] - tol)
            v = lo[i] - x[i];
        else if (x[i] > up[i] + tol)
            v = x[i] - up[i];
        out[i] = v;
    }
}

std::ptrdiff_t argmax_scaled(const double* v, const double* w, std::size_t n) {
    // Two interleaved lanes, merged with a lowest-index tie rule.
    double bs[2] = {0.0, 0.0};
    std::ptrdiff_t bi[2] = {-1, -1};
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const float64x2_t vv = vld1q_f64(v + i);
        const float64x2_t s = vdivq_f64(vmulq_f64(vv, vv), vld1q_f64(w + i));
        double sv[2], vvv[2];
        vst1q_f64(sv, s);
        vst1q_f64(vvv, vv);
        for (int lane = 0; lane < 2; ++lane)
            if (vvv[lane] > 0.0 && sv[lane] > bs[lane]) {
                bs[lane] = sv[lane];
                bi[lane] = static_cast<std::ptrdiff_t>(i) + lane;
            }
    }
    std::ptrdiff_t arg = -1;
    double score = 0.0;
    for (int lane = 0; lane < 2; ++lane) {
        if (bi[lane] < 0) continue;
        if (bs[lane] > score || (bs[lane] == score && bi[lane] < arg)) {
            score = bs[lane];
            arg = bi[lane];
        }
    }
    for (; i < n; ++i) {
        if (!(v[i] > 0.0)) continue;
        const double s = (v[i] * v[i]) / w[i];
        if (s > score) {
            score = s;
            arg = static_cast<std::ptrdiff_t>(i);
        }
    }
    return arg;
}

void dse_update(double* w, const double* alpha, const double* tau, double alpha_r, double w_r, double floor,
                std::size_t n) {
    const float64x2_t ar = vdupq_n_f64(alpha_r), wr = vdupq_n_f64(w_r), fl = vdupq_n_f64(floor);
    const float64x2_t two = vdupq_n_f64(2.0);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const float64x2_t r = vdivq_f64(vld1q_f64(alpha + i), ar);
        const float64x2_t t = vmulq_f64(two, vmulq_f64(r, vld1q_f64(tau + i)));
        const float64x2_t v = vaddq_f64(vsubq_f64(vld1q_f64(w + i), t), vmulq_f64(vmulq_f64(r, r), wr));
        vst1q_f64(w + i, vbslq_f64(vcgtq_f64(v, fl), v, fl));
    }
    for (; i < n; ++i) {
        const double r = alpha[i] / alpha_r;
        const double v = (w[i] - 2.0 * (r * tau[i])) + (r * r) * w_r;
        w[i] = v > floor ? v : floor;
    }
}

}  // namespace

const Table* neon_table() {
    static const Table t{"neon", axpy, infeasibility, argmax_scaled, dse_update};
    return &t;
}

}  // namespace beb::kernels

#else

namespace beb::kernels {
const Table* neon_table() { return nullptr; }
}  // namespace beb::kernels

#endif
