#pragma once

#include "profex/types.hpp"

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace profex {

// Run configuration shared by the config file and the CLI flags. Flat
// key=value entries grouped in [sections]; keys are global, sections are
// documentation only.
struct RunConfig {
  enum class Mode { fit, profile, uq, bivariate, pipeline, demo };
  Mode mode = Mode::demo;

  // inputs
  std::string function = "wave2d";  // demo mode
  std::string doe_csv;
  std::string model_file;

  // thresholds (output units, pre-transform)
  std::vector<double> taus = {0.0};
  std::string transform = "none";  // none | sqrt

  // projections
  std::vector<Index> coords;                        // empty -> all coordinates
  std::vector<std::vector<double>> oblique_dirs;    // explicit psi columns
  std::vector<std::pair<Index, Index>> pairs;       // bivariate coordinate pairs

  // resolutions and budgets
  int grid_n = 100;
  int lattice_n = 30;
  int k_approx = 0;  // 0 -> ceil(10 sqrt(d))
  Index pilots = 80;
  Index sims = 150;
  double alpha = 0.1;
  double beta = 0.0;  // 0 -> alpha / 4
  int n_starts = 0;   // 0 -> per-projection defaults

  std::uint64_t seed = 7;
  int threads = 0;  // 0 -> hardware concurrency
  std::string out_dir = "profex_out";

  // model settings
  std::string kernel_family = "matern52";
  std::string kernel_structure = "tensor_product";
  std::string trend = "constant";  // constant | constant_linear | term list
  int fit_starts = 10;

  int emit_doe = 0;  // demo helper: write a synthetic DoE of this size

  double beta_or_default() const { return beta > 0.0 ? beta : alpha / 4.0; }

  static Mode mode_from_name(const std::string& s);
  static const char* mode_name(Mode m);
};

// Applies one key=value assignment; throws std::invalid_argument on unknown
// keys or unparsable values.
void apply_config_entry(RunConfig& cfg, const std::string& key, const std::string& value);

RunConfig read_config_file(const std::string& path);

}  // namespace profex
