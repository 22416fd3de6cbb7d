#include "profex/simd.hpp"

#include <cstdlib>
#include <cstring>

namespace profex::simd {

namespace {

struct Table {
  Isa isa;
  SqDistFn sq_dist;
  AbsProdFn m32;
  AbsProdFn m52;
};

constexpr Table kScalar = {Isa::scalar, detail::sq_dist_scalar, detail::abs_prod_m32_scalar,
                           detail::abs_prod_m52_scalar};
#if defined(PROFEX_HAVE_AVX2)
constexpr Table kAvx2 = {Isa::avx2, detail::sq_dist_avx2, detail::abs_prod_m32_avx2,
                         detail::abs_prod_m52_avx2};
#endif

bool cpu_has_avx2() {
#if defined(PROFEX_HAVE_AVX2)
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

Table pick_default() {
  if (const char* env = std::getenv("PROFEX_SIMD")) {
    if (std::strcmp(env, "scalar") == 0) return kScalar;
#if defined(PROFEX_HAVE_AVX2)
    if (std::strcmp(env, "avx2") == 0 && cpu_has_avx2()) return kAvx2;
#endif
  }
#if defined(PROFEX_HAVE_AVX2)
  if (cpu_has_avx2()) return kAvx2;
#endif
  return kScalar;
}

Table g_table = pick_default();

}  // namespace

Isa active_isa() { return g_table.isa; }

const char* isa_name(Isa isa) { return isa == Isa::avx2 ? "avx2" : "scalar"; }

bool force_isa(Isa isa) {
  if (isa == Isa::scalar) {
    g_table = kScalar;
    return true;
  }
#if defined(PROFEX_HAVE_AVX2)
  if (isa == Isa::avx2 && cpu_has_avx2()) {
    g_table = kAvx2;
    return true;
  }
#endif
  return false;
}

void sq_dist(const double* q, const double* soa, std::size_t n, std::size_t ldn,
             std::size_t d, double* r2) {
  g_table.sq_dist(q, soa, n, ldn, d, r2);
}

void abs_prod_m32(const double* q, const double* soa, std::size_t n, std::size_t ldn,
                  std::size_t d, double coef, double* sum_abs, double* prod) {
  g_table.m32(q, soa, n, ldn, d, coef, sum_abs, prod);
}

void abs_prod_m52(const double* q, const double* soa, std::size_t n, std::size_t ldn,
                  std::size_t d, double coef, double* sum_abs, double* prod) {
  g_table.m52(q, soa, n, ldn, d, coef, sum_abs, prod);
}

}  // namespace profex::simd
