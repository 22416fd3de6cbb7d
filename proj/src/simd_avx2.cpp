#include "profex/simd.hpp"

#if defined(PROFEX_HAVE_AVX2)

#include <immintrin.h>

#include <cmath>

namespace profex::simd::detail {

namespace {
const __m256d kSignMask = _mm256_set1_pd(-0.0);
inline __m256d abs_pd(__m256d x) { return _mm256_andnot_pd(kSignMask, x); }
}  // namespace

void sq_dist_avx2(const double* q, const double* soa, std::size_t n, std::size_t ldn,
                  std::size_t d, double* r2) {
  const std::size_t n4 = n & ~std::size_t(3);
  for (std::size_t i = 0; i < n4; i += 4) _mm256_storeu_pd(r2 + i, _mm256_setzero_pd());
  for (std::size_t i = n4; i < n; ++i) r2[i] = 0.0;
  for (std::size_t j = 0; j < d; ++j) {
    const __m256d qj = _mm256_set1_pd(q[j]);
    const double* col = soa + j * ldn;
    for (std::size_t i = 0; i < n4; i += 4) {
      const __m256d u = _mm256_sub_pd(qj, _mm256_loadu_pd(col + i));
      const __m256d acc = _mm256_loadu_pd(r2 + i);
      _mm256_storeu_pd(r2 + i, _mm256_fmadd_pd(u, u, acc));
    }
    const double qs = q[j];
    for (std::size_t i = n4; i < n; ++i) {
      const double u = qs - col[i];
      r2[i] = std::fma(u, u, r2[i]);
    }
  }
}

void abs_prod_m32_avx2(const double* q, const double* soa, std::size_t n, std::size_t ldn,
                       std::size_t d, double coef, double* sum_abs, double* prod) {
  const std::size_t n4 = n & ~std::size_t(3);
  for (std::size_t i = 0; i < n; ++i) {
    sum_abs[i] = 0.0;
    prod[i] = 1.0;
  }
  const __m256d vcoef = _mm256_set1_pd(coef);
  const __m256d vone = _mm256_set1_pd(1.0);
  for (std::size_t j = 0; j < d; ++j) {
    const __m256d qj = _mm256_set1_pd(q[j]);
    const double* col = soa + j * ldn;
    for (std::size_t i = 0; i < n4; i += 4) {
      const __m256d a = abs_pd(_mm256_sub_pd(qj, _mm256_loadu_pd(col + i)));
      _mm256_storeu_pd(sum_abs + i, _mm256_add_pd(_mm256_loadu_pd(sum_abs + i), a));
      const __m256d factor = _mm256_fmadd_pd(vcoef, a, vone);
      _mm256_storeu_pd(prod + i, _mm256_mul_pd(_mm256_loadu_pd(prod + i), factor));
    }
    const double qs = q[j];
    for (std::size_t i = n4; i < n; ++i) {
      const double a = std::fabs(qs - col[i]);
      sum_abs[i] += a;
      prod[i] *= std::fma(coef, a, 1.0);
    }
  }
}

void abs_prod_m52_avx2(const double* q, const double* soa, std::size_t n, std::size_t ldn,
                       std::size_t d, double coef, double* sum_abs, double* prod) {
  const std::size_t n4 = n & ~std::size_t(3);
  const double c2s = coef * coef / 3.0;
  for (std::size_t i = 0; i < n; ++i) {
    sum_abs[i] = 0.0;
    prod[i] = 1.0;
  }
  const __m256d vcoef = _mm256_set1_pd(coef);
  const __m256d vc2 = _mm256_set1_pd(c2s);
  const __m256d vone = _mm256_set1_pd(1.0);
  for (std::size_t j = 0; j < d; ++j) {
    const __m256d qj = _mm256_set1_pd(q[j]);
    const double* col = soa + j * ldn;
    for (std::size_t i = 0; i < n4; i += 4) {
      const __m256d u = _mm256_sub_pd(qj, _mm256_loadu_pd(col + i));
      const __m256d a = abs_pd(u);
      _mm256_storeu_pd(sum_abs + i, _mm256_add_pd(_mm256_loadu_pd(sum_abs + i), a));
      // 1 + coef*a + (coef^2/3)*u^2
      const __m256d factor = _mm256_fmadd_pd(vc2, _mm256_mul_pd(u, u),
                                             _mm256_fmadd_pd(vcoef, a, vone));
      _mm256_storeu_pd(prod + i, _mm256_mul_pd(_mm256_loadu_pd(prod + i), factor));
    }
    const double qs = q[j];
    for (std::size_t i = n4; i < n; ++i) {
      const double u = qs - col[i];
      const double a = std::fabs(u);
      sum_abs[i] += a;
      prod[i] *= std::fma(c2s, u * u, std::fma(coef, a, 1.0));
    }
  }
}

}  // namespace profex::simd::detail

#endif  // PROFEX_HAVE_AVX2
