#pragma once

#include "profex/types.hpp"

#include <functional>

namespace profex {

// Runs fn(0..n-1) across `threads` workers on disjoint index sets. Each index
// writes only its own output slot, so results never depend on the thread
// count. Exceptions are captured and rethrown on the calling thread.
void parallel_for(Index n, int threads, const std::function<void(Index)>& fn);

int hardware_threads();

}  // namespace profex
