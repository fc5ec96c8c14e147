#include "beb/kernels.hpp"

#if defined(__x86_64__) && defined(__AVX2__)
#include <immintrin.h>

namespace beb::kernels {

namespace {

void axpy(double a, const double* x, double* y, std::size_t n) {
    const __m256d va = _mm256_set1_pd(a);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d p = _mm256_mul_pd(va, _mm256_loadu_pd(x + i));
        _mm256_storeu_pd(y + i, _mm256_add_pd(_mm256_loadu_pd(y + i), p));
    }
    for (; i < n; ++i) y[i] = y[i] + a * x[i];
}

void infeasibility(const double* x, const double* lo, const double* up, double tol, double* out, std::size_t n) {
    const __m256d vt = _mm256_set1_pd(tol);
    const __m256d zero = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d vx = _mm256_loadu_pd(x + i);
        const __m256d vl = _mm256_loadu_pd(lo + i);
        const __m256d vu = _mm256_loadu_pd(up + i);
        const __m256d below = _mm256_cmp_pd(vx, _mm256_sub_pd(vl, vt), _CMP_LT_OQ);
        const __m256d above = _mm256_cmp_pd(vx, _mm256_add_pd(vu, vt), _CMP_GT_OQ);
        __m256d v = _mm256_blendv_pd(zero, _mm256_sub_pd(vx, vu), above);
        v = _mm256_blendv_pd(v, _mm256_sub_pd(vl, vx), below);
        _mm256_storeu_pd(out + i, v);
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
    __m256d best = _mm256_setzero_pd();
    __m256d best_idx = _mm256_set1_pd(-1.0);
    __m256d idx = _mm256_setr_pd(0.0, 1.0, 2.0, 3.0);
    const __m256d four = _mm256_set1_pd(4.0);
    const __m256d zero = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d vv = _mm256_loadu_pd(v + i);
        const __m256d s = _mm256_div_pd(_mm256_mul_pd(vv, vv), _mm256_loadu_pd(w + i));
        const __m256d take = _mm256_and_pd(_mm256_cmp_pd(vv, zero, _CMP_GT_OQ), _mm256_cmp_pd(s, best, _CMP_GT_OQ));
        best = _mm256_blendv_pd(best, s, take);
        best_idx = _mm256_blendv_pd(best_idx, idx, take);
        idx = _mm256_add_pd(idx, four);
    }
    alignas(32) double bs[4], bi[4];
    _mm256_store_pd(bs, best);
    _mm256_store_pd(bi, best_idx);
    std::ptrdiff_t arg = -1;
    double score = 0.0;
    for (int lane = 0; lane < 4; ++lane) {
        if (bi[lane] < 0) continue;
        const auto li = static_cast<std::ptrdiff_t>(bi[lane]);
        if (bs[lane] > score || (bs[lane] == score && li < arg)) {
            score = bs[lane];
            arg = li;
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
    const __m256d ar = _mm256_set1_pd(alpha_r);
    const __m256d wr = _mm256_set1_pd(w_r);
    const __m256d fl = _mm256_set1_pd(floor);
    const __m256d two = _mm256_set1_pd(2.0);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d r = _mm256_div_pd(_mm256_loadu_pd(alpha + i), ar);
        const __m256d t = _mm256_mul_pd(two, _mm256_mul_pd(r, _mm256_loadu_pd(tau + i)));
        const __m256d v = _mm256_add_pd(_mm256_sub_pd(_mm256_loadu_pd(w + i), t), _mm256_mul_pd(_mm256_mul_pd(r, r), wr));
        // v > floor ? v : floor, matching the scalar select exactly.
        _mm256_storeu_pd(w + i, _mm256_blendv_pd(fl, v, _mm256_cmp_pd(v, fl, _CMP_GT_OQ)));
    }
    for (; i < n; ++i) {
        const double r = alpha[i] / alpha_r;
        const double v = (w[i] - 2.0 * (r * tau[i])) + (r * r) * w_r;
        w[i] = v > floor ? v : floor;
    }
}

}  // namespace

const Table* avx2_table() {
    static const Table t{"avx2", axpy, infeasibility, argmax_scaled, dse_update};
    return __builtin_cpu_supports("avx2") ? &t : nullptr;
}

}  // namespace beb::kernels

#else

namespace beb::kernels {
const Table* avx2_table() { return nullptr; }
}  // namespace beb::kernels

#endif
