#pragma once

#include "profex/rng.hpp"
#include "profex/types.hpp"

namespace profex {

// Latin hypercube on [0,1]^d: one stratified sample per row/column pair.
Matrix latin_hypercube(Index n, Index d, CounterRng& rng);

// Best-of-`restarts` LHS by maximin (largest minimal pairwise distance).
Matrix maximin_lhs(Index n, Index d, std::uint64_t seed, int restarts = 50);

// First n Sobol' points (indices 1..n, the origin is skipped), d <= 8.
Matrix sobol_sequence(Index n, Index d);

}  // namespace profex
