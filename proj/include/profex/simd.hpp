#pragma once

#include <cstddef>
#include <string>

namespace profex::simd {

// The covariance inner loops run over the training design in SoA layout
// (coordinate j of all n points contiguous, pre-divided by the lengthscale).
// Each kernel accumulates per-point reductions across coordinates; the
// transcendental finishers stay scalar in every variant, so instruction-set
// differences come only from reordered adds/FMA.

enum class Isa { scalar, avx2 };

Isa active_isa();
const char* isa_name(Isa isa);
// Test hook; returns false if the requested set is unavailable on this CPU.
bool force_isa(Isa isa);

using SqDistFn = void (*)(const double* q, const double* soa, std::size_t n,
                          std::size_t ldn, std::size_t d, double* r2);
using AbsProdFn = void (*)(const double* q, const double* soa, std::size_t n,
                           std::size_t ldn, std::size_t d, double coef,
                           double* sum_abs, double* prod);

// r2[i] = sum_j (q[j] - soa[j*ldn + i])^2
void sq_dist(const double* q, const double* soa, std::size_t n, std::size_t ldn,
             std::size_t d, double* r2);

// Tensor Matern nu=3/2 parts: sum_abs[i] = sum_j |u_ij|,
// prod[i] = prod_j (1 + coef*|u_ij|), with u_ij = q[j] - soa[j*ldn+i].
void abs_prod_m32(const double* q, const double* soa, std::size_t n, std::size_t ldn,
                  std::size_t d, double coef, double* sum_abs, double* prod);

// Tensor Matern nu=5/2 parts: prod_j (1 + coef*|u|+ (coef^2/3)*u^2).
void abs_prod_m52(const double* q, const double* soa, std::size_t n, std::size_t ldn,
                  std::size_t d, double coef, double* sum_abs, double* prod);

namespace detail {
void sq_dist_scalar(const double*, const double*, std::size_t, std::size_t, std::size_t, double*);
void abs_prod_m32_scalar(const double*, const double*, std::size_t, std::size_t, std::size_t,
                         double, double*, double*);
void abs_prod_m52_scalar(const double*, const double*, std::size_t, std::size_t, std::size_t,
                         double, double*, double*);
#if defined(PROFEX_HAVE_AVX2)
void sq_dist_avx2(const double*, const double*, std::size_t, std::size_t, std::size_t, double*);
void abs_prod_m32_avx2(const double*, const double*, std::size_t, std::size_t, std::size_t,
                       double, double*, double*);
void abs_prod_m52_avx2(const double*, const double*, std::size_t, std::size_t, std::size_t,
                       double, double*, double*);
#endif
}  // namespace detail

}  // namespace profex::simd
