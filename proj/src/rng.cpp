#include "profex/rng.hpp"

#include "profex/types.hpp"

#include <cmath>

namespace profex {

namespace {

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
  const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(p >> 32);
  lo = static_cast<std::uint32_t>(p);
}

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

}  // namespace

std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> c,
                                           std::array<std::uint32_t, 2> k) {
  for (int round = 0; round < 10; ++round) {
    if (round > 0) {
      k[0] += kWeyl0;
      k[1] += kWeyl1;
    }
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kPhiloxM0, c[0], hi0, lo0);
    mulhilo(kPhiloxM1, c[2], hi1, lo1);
    c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
  }
  return c;
}

std::uint64_t derive_stream(std::uint64_t a, std::uint64_t b) {
  std::uint64_t z = a + 0x9E3779B97F4A7C15ull * (b + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

namespace {

// One Philox block yields two 64-bit words; sample `index` uses word index&1
// of block index>>1.
std::uint64_t word_at(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
  const std::uint64_t block = index >> 1;
  const std::array<std::uint32_t, 4> ctr = {
      static_cast<std::uint32_t>(block), static_cast<std::uint32_t>(block >> 32),
      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  const std::array<std::uint32_t, 2> key = {static_cast<std::uint32_t>(seed),
                                            static_cast<std::uint32_t>(seed >> 32)};
  const auto out = philox4x32_10(ctr, key);
  const int w = static_cast<int>(index & 1);
  return (static_cast<std::uint64_t>(out[2 * w + 1]) << 32) | out[2 * w];
}

}  // namespace

double CounterRng::uniform_at(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
  const std::uint64_t u53 = word_at(seed, stream, index) >> 11;
  return (static_cast<double>(u53) + 0.5) * 0x1.0p-53;
}

double CounterRng::normal_at(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
  return normal_quantile(uniform_at(seed, stream, index));
}

std::uint64_t CounterRng::below(std::uint64_t n) {
  require(n >= 1, "CounterRng::below: n must be >= 1");
  return static_cast<std::uint64_t>(uniform() * static_cast<double>(n)) % n;
}

namespace {

constexpr double kTwoOverSqrtPi = 1.1283791670955126;  // 2/sqrt(pi)

// Inverse of erfc on (0,2). Newton iterations on erfc(z) - y with an
// asymptotic (large z) or series (small z) starting point.
double erfc_inv(double y) {
  if (y == 1.0) return 0.0;
  const bool flip = y > 1.0;
  if (flip) y = 2.0 - y;  // now y in (0,1), result z >= 0

  double z;
  if (y > 0.5) {
    z = (1.0 - y) / kTwoOverSqrtPi;  // erfc(z) ~ 1 - 2z/sqrt(pi)
  } else {
    const double t = -std::log(y);
    z = std::sqrt(t > 1.0 ? t - 0.5 * std::log(t) : t);
  }
  for (int it = 0; it < 6; ++it) {
    const double err = std::erfc(z) - y;
    const double deriv = -kTwoOverSqrtPi * std::exp(-z * z);
    const double step = err / deriv;
    z -= step;
    if (std::abs(step) <= 1e-15 * (1.0 + std::abs(z))) break;
  }
  return flip ? -z : z;
}

}  // namespace

double normal_quantile(double p) {
  require(p > 0.0 && p < 1.0, "normal_quantile: p must be in (0,1)");
  // Phi(x) = erfc(-x/sqrt(2))/2; the upper branch works on 1-p (exact for
  // p >= 0.5), so the two tails are bit-exact mirrors.
  if (p <= 0.5) return -std::sqrt(2.0) * erfc_inv(2.0 * p);
  return std::sqrt(2.0) * erfc_inv(2.0 * (1.0 - p));
}

}  // namespace profex
