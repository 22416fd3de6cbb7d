#include "profex/simd.hpp"

#include <cmath>

namespace profex::simd::detail {

void sq_dist_scalar(const double* q, const double* soa, std::size_t n, std::size_t ldn,
                    std::size_t d, double* r2) {
  for (std::size_t i = 0; i < n; ++i) r2[i] = 0.0;
  for (std::size_t j = 0; j < d; ++j) {
    const double qj = q[j];
    const double* col = soa + j * ldn;
    for (std::size_t i = 0; i < n; ++i) {
      const double u = qj - col[i];
      r2[i] += u * u;
    }
  }
}

void abs_prod_m32_scalar(const double* q, const double* soa, std::size_t n, std::size_t ldn,
                         std::size_t d, double coef, double* sum_abs, double* prod) {
  for (std::size_t i = 0; i < n; ++i) {
    sum_abs[i] = 0.0;
    prod[i] = 1.0;
  }
  for (std::size_t j = 0; j < d; ++j) {
    const double qj = q[j];
    const double* col = soa + j * ldn;
    for (std::size_t i = 0; i < n; ++i) {
      const double a = std::fabs(qj - col[i]);
      sum_abs[i] += a;
      prod[i] *= 1.0 + coef * a;
    }
  }
}

void abs_prod_m52_scalar(const double* q, const double* soa, std::size_t n, std::size_t ldn,
                         std::size_t d, double coef, double* sum_abs, double* prod) {
  const double c2 = coef * coef / 3.0;
  for (std::size_t i = 0; i < n; ++i) {
    sum_abs[i] = 0.0;
    prod[i] = 1.0;
  }
  for (std::size_t j = 0; j < d; ++j) {
    const double qj = q[j];
    const double* col = soa + j * ldn;
    for (std::size_t i = 0; i < n; ++i) {
      const double u = qj - col[i];
      const double a = std::fabs(u);
      sum_abs[i] += a;
      prod[i] *= 1.0 + coef * a + c2 * u * u;
    }
  }
}

}  // namespace profex::simd::detail
