#pragma once

#include <cstddef>
#include <string_view>

namespace beb::kernels {

// Dense loops of the dual simplex. Every variant performs the same IEEE
// operations in the same order (no FMA), so results are bit-identical.

/// y[i] += a * x[i]
using AxpyFn = void (*)(double a, const double* x, double* y, std::size_t n);

/// out[i] = lo[i] - x[i] if x[i] < lo[i] - tol, x[i] - up[i] if x[i] > up[i] + tol, else 0.
using InfeasFn = void (*)(const double* x, const double* lo, const double* up, double tol, double* out,
                          std::size_t n);

/// argmax of v[i]*v[i]/w[i] over v[i] > 0; lowest index on ties; -1 if none.
using ArgmaxFn = std::ptrdiff_t (*)(const double* v, const double* w, std::size_t n);

/// Dual steepest-edge weights after a pivot with column alpha, pivot element
/// alpha_r and tau = B^-1 rho_r: r = alpha[i]/alpha_r,
/// w[i] = max((w[i] - 2*(r*tau[i])) + (r*r)*w_r, floor). The caller fixes row r.
using DseFn = void (*)(double* w, const double* alpha, const double* tau, double alpha_r, double w_r,
                       double floor, std::size_t n);

struct Table {
    std::string_view name;
    AxpyFn axpy;
    InfeasFn infeasibility;
    ArgmaxFn argmax_scaled;
    DseFn dse_update;
};

const Table& scalar_table();
/// nullptr when the variant is not compiled in or the CPU lacks it.
const Table* avx2_table();
const Table* neon_table();

/// Best supported table; BEB_SIMD=scalar|avx2|neon overrides when available.
const Table& active();

}  // namespace beb::kernels
