#include "profex/doe.hpp"

#include <algorithm>
#include <cstdint>
#include <limits>
#include <numeric>
#include <vector>

namespace profex {

Matrix latin_hypercube(Index n, Index d, CounterRng& rng) {
  require(n >= 1 && d >= 1, "latin_hypercube: n and d must be positive");
  Matrix pts(n, d);
  std::vector<Index> perm(static_cast<size_t>(n));
  for (Index j = 0; j < d; ++j) {
    std::iota(perm.begin(), perm.end(), Index{0});
    for (Index i = n - 1; i > 0; --i) {
      const auto k = static_cast<Index>(rng.below(static_cast<std::uint64_t>(i) + 1));
      std::swap(perm[static_cast<size_t>(i)], perm[static_cast<size_t>(k)]);
    }
    for (Index i = 0; i < n; ++i) {
      pts(i, j) = (static_cast<double>(perm[static_cast<size_t>(i)]) + rng.uniform()) /
                  static_cast<double>(n);
    }
  }
  return pts;
}

namespace {

double min_pairwise_sq_dist(const Matrix& pts) {
  double best = std::numeric_limits<double>::infinity();
  for (Index i = 0; i < pts.rows(); ++i)
    for (Index j = i + 1; j < pts.rows(); ++j)
      best = std::min(best, (pts.row(i) - pts.row(j)).squaredNorm());
  return best;
}

}  // namespace

Matrix maximin_lhs(Index n, Index d, std::uint64_t seed, int restarts) {
  require(restarts >= 1, "maximin_lhs: restarts must be >= 1");
  Matrix best;
  double best_score = -1.0;
  for (int r = 0; r < restarts; ++r) {
    CounterRng rng(seed, derive_stream(0x10c5 /* lhs tag */, static_cast<std::uint64_t>(r)));
    Matrix cand = latin_hypercube(n, d, rng);
    const double score = min_pairwise_sq_dist(cand);
    if (score > best_score) {
      best_score = score;
      best = std::move(cand);
    }
  }
  return best;
}

namespace {

struct SobolDim {
  unsigned s;                  // degree of the primitive polynomial
  unsigned a;                  // coefficient bits a_1..a_{s-1}
  std::vector<std::uint32_t> m;  // initial direction integers
};

// Direction numbers for the first 8 dimensions (dimension 1 is the
// van der Corput sequence and needs no table entry).
const SobolDim kSobolDims[] = {
    {1, 0, {1}},            // dim 2
    {2, 1, {1, 3}},         // dim 3
    {3, 1, {1, 3, 1}},      // dim 4
    {3, 2, {1, 1, 1}},      // dim 5
    {4, 1, {1, 1, 3, 3}},   // dim 6
    {4, 4, {1, 3, 5, 13}},  // dim 7
    {5, 2, {1, 1, 5, 5, 17}},  // dim 8
};

constexpr unsigned kSobolBits = 32;

// v[k] = m_k * 2^(32-k) with the m recurrence of the chosen polynomial.
std::vector<std::uint32_t> direction_vector(Index dim) {
  std::vector<std::uint32_t> v(kSobolBits + 1, 0);
  if (dim == 0) {
    for (unsigned k = 1; k <= kSobolBits; ++k) v[k] = 1u << (kSobolBits - k);
    return v;
  }
  const SobolDim& sd = kSobolDims[dim - 1];
  std::vector<std::uint32_t> m(kSobolBits + 1, 0);
  for (unsigned k = 1; k <= sd.s && k <= kSobolBits; ++k) m[k] = sd.m[k - 1];
  for (unsigned k = sd.s + 1; k <= kSobolBits; ++k) {
    std::uint32_t mk = m[k - sd.s] ^ (m[k - sd.s] << sd.s);
    for (unsigned i = 1; i < sd.s; ++i) {
      if ((sd.a >> (sd.s - 1 - i)) & 1u) mk ^= m[k - i] << i;
    }
    m[k] = mk;
  }
  for (unsigned k = 1; k <= kSobolBits; ++k) v[k] = m[k] << (kSobolBits - k);
  return v;
}

}  // namespace

Matrix sobol_sequence(Index n, Index d) {
  require(d >= 1 && d <= 8, "sobol_sequence: d must be in [1,8]");
  require(n >= 1, "sobol_sequence: n must be >= 1");
  std::vector<std::vector<std::uint32_t>> v(static_cast<size_t>(d));
  for (Index j = 0; j < d; ++j) v[static_cast<size_t>(j)] = direction_vector(j);

  Matrix pts(n, d);
  std::vector<std::uint32_t> x(static_cast<size_t>(d), 0);
  for (Index i = 1; i <= n; ++i) {
    // Gray-code step: flip at the lowest zero bit of i-1.
    unsigned c = 1;
    for (std::uint64_t mask = static_cast<std::uint64_t>(i) - 1; mask & 1; mask >>= 1) ++c;
    for (Index j = 0; j < d; ++j) {
      x[static_cast<size_t>(j)] ^= v[static_cast<size_t>(j)][c];
      pts(i - 1, j) = static_cast<double>(x[static_cast<size_t>(j)]) * 0x1.0p-32;
    }
  }
  return pts;
}

}  // namespace profex
