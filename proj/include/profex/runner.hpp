#pragma once

#include "profex/config.hpp"

namespace profex {

// Executes one configured run; writes all artifacts under cfg.out_dir.
// Returns a process exit code (0 on success).
int run(const RunConfig& cfg);

}  // namespace profex
