#include "profex/config.hpp"
#include "profex/runner.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <string>
#include <vector>

namespace {

// --projection accepts coord:<i>, dir:<v1,v2,...>, or pair:<i,j> (1-based).
void apply_projection_flag(profex::RunConfig& cfg, const std::string& spec) {
  const auto colon = spec.find(':');
  if (colon == std::string::npos)
    throw std::invalid_argument("--projection expects coord:<i>, dir:<...> or pair:<i,j>");
  const std::string kind = spec.substr(0, colon);
  const std::string rest = spec.substr(colon + 1);
  if (kind == "coord") {
    profex::apply_config_entry(cfg, "coords", rest);
  } else if (kind == "dir") {
    profex::apply_config_entry(cfg, "direction", rest);
  } else if (kind == "pair") {
    profex::apply_config_entry(cfg, "pair", rest);
  } else {
    throw std::invalid_argument("unknown projection kind '" + kind + "'");
  }
}

// The config file loads first; flags the user actually typed then overwrite
// the bound fields (CLI11 leaves untouched options alone).
std::string find_config_arg(int argc, char** argv) {
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--config" && i + 1 < argc) return argv[i + 1];
    if (a.rfind("--config=", 0) == 0) return a.substr(9);
  }
  return "";
}

}  // namespace

int main(int argc, char** argv) {
  profex::RunConfig cfg;
  try {
    const std::string config_path = find_config_arg(argc, argv);
    if (!config_path.empty()) cfg = profex::read_config_file(config_path);
  } catch (const std::exception& e) {
    std::cerr << "profex: " << e.what() << '\n';
    return 1;
  }

  CLI::App app{
      "profex: excursion-set profiles of expensive functions via Gaussian-process\n"
      "emulation, with Monte Carlo envelopes and conservative bounds"};
  app.require_subcommand(1);

  std::string config_path_dummy;
  std::vector<std::string> projections;
  std::vector<double> taus;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path_dummy, "key=value config file; flags override it");
    sub->add_option("--seed", cfg.seed, "deterministic generator seed");
    sub->add_option("--threads", cfg.threads, "worker threads (0 = all cores)");
    sub->add_option("--tau", taus, "threshold(s) in output units");
    sub->add_option("--projection", projections,
                    "coord:<i>, dir:<v1,v2,...> or pair:<i,j>; repeatable");
    sub->add_option("--grid", cfg.grid_n, "1-d grid resolution (default 100)");
    sub->add_option("--k", cfg.k_approx,
                    "spline-approximate 1-d profiles from this many exact solves "
                    "(0 = exact everywhere, -1 = ceil(10 sqrt(d)))");
    sub->add_option("--lattice", cfg.lattice_n, "2-d lattice resolution per axis (default 30)");
    sub->add_option("--pilots", cfg.pilots, "number of pilot points");
    sub->add_option("--sims", cfg.sims, "number of approximate posterior realizations");
    sub->add_option("--alpha", cfg.alpha, "bound confidence level (needs alpha > 2*beta)");
    sub->add_option("--beta", cfg.beta, "envelope quantile level (default alpha/4)");
    sub->add_option("--out", cfg.out_dir, "output directory");
    sub->add_option("--starts", cfg.n_starts, "multi-start count per profile node");
  };

  auto* fit = app.add_subcommand("fit", "fit a GP emulator from a DoE CSV");
  fit->add_option("--doe", cfg.doe_csv, "input DoE CSV (header row; response column 'y' or last)");
  fit->add_option("--transform", cfg.transform, "none | sqrt output transform");
  fit->add_option("--kernel", cfg.kernel_family, "matern32 | matern52 | gaussian");
  fit->add_option("--structure", cfg.kernel_structure, "tensor_product | isotropic");
  fit->add_option("--trend", cfg.trend, "constant | constant_linear | term list");
  fit->add_option("--fit-starts", cfg.fit_starts, "likelihood multi-start count");
  add_common(fit);

  auto* prof = app.add_subcommand("profile", "profile extrema of the posterior mean");
  prof->add_option("--model", cfg.model_file, "model file from fit");
  prof->add_option("--transform", cfg.transform, "threshold transform (match the fit)");
  add_common(prof);

  auto* uq = app.add_subcommand("uq", "quantile envelopes and conservative bounds");
  uq->add_option("--model", cfg.model_file, "model file from fit");
  uq->add_option("--transform", cfg.transform, "threshold transform (match the fit)");
  add_common(uq);

  auto* biv = app.add_subcommand("bivariate", "bivariate profile maps");
  biv->add_option("--model", cfg.model_file, "model file from fit");
  biv->add_option("--transform", cfg.transform, "threshold transform (match the fit)");
  add_common(biv);

  auto* pipe = app.add_subcommand("pipeline", "fit + profiles + uq + bivariate");
  pipe->add_option("--doe", cfg.doe_csv, "input DoE CSV");
  pipe->add_option("--model", cfg.model_file, "reuse an existing model file");
  pipe->add_option("--transform", cfg.transform, "none | sqrt output transform");
  pipe->add_option("--kernel", cfg.kernel_family, "matern32 | matern52 | gaussian");
  pipe->add_option("--structure", cfg.kernel_structure, "tensor_product | isotropic");
  pipe->add_option("--trend", cfg.trend, "constant | constant_linear | term list");
  add_common(pipe);

  auto* demo = app.add_subcommand("demo", "profiles of a built-in analytic function");
  demo->add_option("--function", cfg.function, "wave2d | wave3d | synth5d");
  demo->add_option("--emit-doe", cfg.emit_doe, "write a synthetic DoE CSV of this size and exit");
  add_common(demo);

  CLI11_PARSE(app, argc, argv);

  try {
    if (fit->parsed()) cfg.mode = profex::RunConfig::Mode::fit;
    if (prof->parsed()) cfg.mode = profex::RunConfig::Mode::profile;
    if (uq->parsed()) cfg.mode = profex::RunConfig::Mode::uq;
    if (biv->parsed()) cfg.mode = profex::RunConfig::Mode::bivariate;
    if (pipe->parsed()) cfg.mode = profex::RunConfig::Mode::pipeline;
    if (demo->parsed()) cfg.mode = profex::RunConfig::Mode::demo;
    if (!taus.empty()) cfg.taus = taus;
    for (const auto& p : projections) apply_projection_flag(cfg, p);
    return profex::run(cfg);
  } catch (const std::exception& e) {
    std::cerr << "profex: " << e.what() << '\n';
    return 1;
  }
}
