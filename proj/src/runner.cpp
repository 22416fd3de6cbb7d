#include "profex/runner.hpp"

#include "profex/csvio.hpp"
#include "profex/doe.hpp"
#include "profex/gp.hpp"
#include "profex/profiles.hpp"
#include "profex/simd.hpp"
#include "profex/spline.hpp"
#include "profex/testfns.hpp"
#include "profex/threading.hpp"
#include "profex/uq.hpp"

#include <json.hpp>

#include <chrono>
#include <memory>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

namespace profex {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kVersion = "1.0.0";

struct RunContext {
  RunConfig cfg;
  fs::path out;
  std::ofstream log;
  json summary;
  int threads = 1;
  int verbosity = 0;

  void note(const std::string& msg) {
    const auto now = std::chrono::system_clock::now().time_since_epoch();
    const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(now).count();
    log << "[" << ms << "] " << msg << '\n';
    log.flush();
    if (verbosity > 0) std::cerr << "profex: " << msg << '\n';
  }
};

double transform_value(const RunConfig& cfg, double y) {
  if (cfg.transform == "sqrt") {
    require(y >= 0.0, "sqrt transform needs nonnegative values");
    return std::sqrt(y);
  }
  return y;
}

json interval_list(const std::vector<Interval>& ivs) {
  json arr = json::array();
  for (const auto& iv : ivs) {
    json j = json::array({iv.lo, iv.hi});
    arr.push_back(j);
  }
  return arr;
}

// Threshold partition of a single curve (values treated as both sup and inf
// so the non-excursion/excursion lists read directly off one side).
ExcursionIntervals single_side_intervals(const Vector& etas, const Vector& values, double tau) {
  ProfileCurve c;
  c.etas = etas;
  c.sup = values;
  c.inf = values;
  return excursion_intervals(c, tau);
}

json curve_threshold_json(const ProfileCurve& curve, double tau_model, double tau_input,
                          const CrossingRefiner* refiner = nullptr) {
  ExcursionIntervals iv = excursion_intervals(curve, tau_model, refiner);
  json j;
  j["tau"] = tau_model;
  j["tau_input"] = tau_input;
  j["non_excursion"] = interval_list(iv.non_excursion);
  j["excursion"] = interval_list(iv.excursion);
  j["undetermined"] = interval_list(iv.undetermined);
  return j;
}

void write_curve_json(const fs::path& path, const std::string& label,
                      const ProfileCurve& curve, const RunContext& ctx,
                      const std::vector<double>& taus_model) {
  json j;
  j["projection"] = label;
  j["grid"] = {{"n", curve.etas.size()},
               {"eta_min", curve.etas.minCoeff()},
               {"eta_max", curve.etas.maxCoeff()}};
  j["provenance"] = curve.provenance == Provenance::exact
                        ? "exact"
                        : (curve.provenance == Provenance::spline_approx ? "spline_approx"
                                                                         : "kriging_approx");
  if (curve.provenance != Provenance::exact) j["approx_knots"] = curve.approx_knots;
  json th = json::array();
  for (size_t t = 0; t < taus_model.size(); ++t)
    th.push_back(curve_threshold_json(curve, taus_model[t], ctx.cfg.taus[t]));
  j["thresholds"] = th;
  std::ofstream out(path);
  out << j.dump(2) << '\n';
}

struct LoadedDoe {
  Matrix X;          // normalized inputs
  Vector y;          // transformed response
  Vector y_raw;      // as read
  Vector in_lo, in_hi;
  std::vector<std::string> input_names;
  std::string response_name;
};

LoadedDoe load_doe(RunContext& ctx) {
  require(!ctx.cfg.doe_csv.empty(), "this mode needs a DoE CSV (doe=...)");
  CsvTable t = read_csv(ctx.cfg.doe_csv);
  require(t.header.size() >= 2, "DoE CSV needs at least one input and one response column");
  Index ycol = t.column("y");
  if (ycol < 0) ycol = t.column("response");
  if (ycol < 0) ycol = static_cast<Index>(t.header.size()) - 1;

  LoadedDoe d;
  d.response_name = t.header[static_cast<size_t>(ycol)];
  const Index n = t.values.rows();
  const Index dcols = t.values.cols() - 1;
  d.X.resize(n, dcols);
  d.y_raw.resize(n);
  Index c = 0;
  for (Index j = 0; j < t.values.cols(); ++j) {
    if (j == ycol) {
      d.y_raw = t.values.col(j);
      continue;
    }
    d.input_names.push_back(t.header[static_cast<size_t>(j)]);
    d.X.col(c++) = t.values.col(j);
  }
  // normalize inputs to [0,1] when needed, recording the bounds
  d.in_lo.resize(dcols);
  d.in_hi.resize(dcols);
  for (Index j = 0; j < dcols; ++j) {
    const double lo = d.X.col(j).minCoeff();
    const double hi = d.X.col(j).maxCoeff();
    if (lo >= -1e-9 && hi <= 1.0 + 1e-9) {
      d.in_lo[j] = 0.0;
      d.in_hi[j] = 1.0;
    } else {
      require(hi > lo, "DoE input column is constant: " + d.input_names[static_cast<size_t>(j)]);
      d.in_lo[j] = lo;
      d.in_hi[j] = hi;
      d.X.col(j) = (d.X.col(j).array() - lo) / (hi - lo);
      ctx.note("normalized input " + d.input_names[static_cast<size_t>(j)]);
    }
  }
  d.y.resize(n);
  for (Index i = 0; i < n; ++i) d.y[i] = transform_value(ctx.cfg, d.y_raw[i]);
  return d;
}

TrendBasis trend_from_config(const RunConfig& cfg, Index d) {
  if (cfg.trend == "constant") return TrendBasis::constant();
  if (cfg.trend == "constant_linear") return TrendBasis::constant_linear(d);
  std::vector<TrendTerm> terms;
  std::string tok;
  std::istringstream is(cfg.trend);
  while (is >> tok) terms.push_back(TrendTerm::parse(tok));
  return TrendBasis(std::move(terms));
}

GpModel run_fit(RunContext& ctx) {
  LoadedDoe doe = load_doe(ctx);
  ctx.note("fitting GP on " + std::to_string(doe.y.size()) + " points");
  FitConfig fcfg;
  fcfg.n_starts = ctx.cfg.fit_starts;
  fcfg.seed = ctx.cfg.seed;
  GpModel model = fit_gp(doe.X, doe.y, family_from_name(ctx.cfg.kernel_family),
                         structure_from_name(ctx.cfg.kernel_structure),
                         trend_from_config(ctx.cfg, doe.X.cols()), fcfg);
  const std::string model_path = (ctx.out / "model.txt").string();
  save_model(model, model_path);
  const double q2loo = loo_q2(model);
  ctx.note("model saved, LOO Q2 = " + std::to_string(q2loo));

  json meta;
  meta["file"] = "model.txt";
  meta["n"] = model.n();
  meta["dim"] = model.dim();
  meta["kernel"] = ctx.cfg.kernel_family;
  meta["structure"] = ctx.cfg.kernel_structure;
  meta["transform"] = ctx.cfg.transform;
  meta["loo_q2"] = q2loo;
  json lo = json::array(), hi = json::array(), names = json::array();
  for (Index j = 0; j < doe.in_lo.size(); ++j) {
    lo.push_back(doe.in_lo[j]);
    hi.push_back(doe.in_hi[j]);
    names.push_back(doe.input_names[static_cast<size_t>(j)]);
  }
  meta["input_lower"] = lo;
  meta["input_upper"] = hi;
  meta["input_names"] = names;
  ctx.summary["model"] = meta;
  return model;
}

std::vector<double> model_taus(const RunContext& ctx) {
  std::vector<double> out;
  for (double t : ctx.cfg.taus) out.push_back(transform_value(ctx.cfg, t));
  return out;
}

void warn_taus(RunContext& ctx, const GpModel& model, const std::vector<double>& taus) {
  const double ymin = model.observations().minCoeff();
  const double ymax = model.observations().maxCoeff();
  const double pad = 0.25 * (ymax - ymin);
  for (double t : taus) {
    if (t < ymin - pad || t > ymax + pad)
      ctx.note("warning: threshold " + std::to_string(t) +
               " is outside the observed+extrapolated response range");
  }
}

struct ProjectionTask {
  std::string label;     // coord1, dir1, ...
  Projection proj;
};

std::vector<ProjectionTask> univariate_tasks(const RunConfig& cfg, Index d) {
  std::vector<ProjectionTask> tasks;
  std::vector<Index> coords = cfg.coords;
  if (coords.empty() && cfg.oblique_dirs.empty()) {
    for (Index i = 0; i < d; ++i) coords.push_back(i);
  }
  for (Index i : coords) {
    require(i >= 0 && i < d, "projection coordinate out of range");
    tasks.push_back({"coord" + std::to_string(i + 1), Projection::coordinate(i, d)});
  }
  int k = 0;
  for (const auto& dir : cfg.oblique_dirs) {
    require(static_cast<Index>(dir.size()) == d, "direction dimension mismatch");
    Vector v(d);
    for (Index j = 0; j < d; ++j) v[j] = dir[static_cast<size_t>(j)];
    tasks.push_back({"dir" + std::to_string(++k), Projection::oblique(v)});
  }
  return tasks;
}

ProfileConfig profile_config(const RunContext& ctx) {
  ProfileConfig pc;
  pc.seed = ctx.cfg.seed;
  pc.threads = ctx.threads;
  pc.n_starts = ctx.cfg.n_starts;
  return pc;
}

// Univariate profiles of one objective (posterior mean or demo function).
// k_approx != 0 switches to the spline approximation: exact solves at k
// space-filling knots, interpolated onto the full grid.
json run_univariate(RunContext& ctx, const Objective& obj, const GradientFn* grad,
                    const BoxDomain& box, const std::vector<double>& taus_model) {
  json out = json::array();
  ProfileConfig pc = profile_config(ctx);
  int k = ctx.cfg.k_approx;
  if (k < 0) k = static_cast<int>(std::ceil(10.0 * std::sqrt(static_cast<double>(box.dim()))));
  require(k == 0 || k >= 4, "approximation needs at least 4 knots");

  for (const auto& task : univariate_tasks(ctx.cfg, box.dim())) {
    ProfileGrid grid = task.proj.kind == Projection::Kind::coordinate
                           ? grid_1d_range(box.lower[task.proj.coord],
                                           box.upper[task.proj.coord], ctx.cfg.grid_n)
                           : grid_1d(task.proj, box, ctx.cfg.grid_n);
    auto solve_on = [&](const ProfileGrid& g) {
      return task.proj.kind == Projection::Kind::coordinate
                 ? coordinate_profiles(obj, grad, task.proj.coord, box, g, pc)
                 : oblique_profiles(obj, grad, task.proj, box, g, pc);
    };
    ProfileCurve curve;
    if (k == 0) {
      curve = solve_on(grid);
    } else {
      const double lo = grid.etas.col(0).minCoeff(), hi = grid.etas.col(0).maxCoeff();
      Vector knots(k);
      CounterRng rng(ctx.cfg.seed, derive_stream(0x50a7, 0));
      for (int i = 0; i < k; ++i)
        knots[i] = lo + (hi - lo) * (i + rng.uniform()) / static_cast<double>(k);
      ProfileGrid kg;
      kg.etas = knots;
      kg.feasible.assign(static_cast<size_t>(k), true);
      kg.shape = {k};
      ProfileCurve at_knots = solve_on(kg);
      curve = approximate_profile_1d(knots, at_knots.sup, at_knots.inf, grid.etas.col(0));
      ctx.note(task.label + ": spline approximation from " + std::to_string(k) + " knots");
    }
    const std::string stem = "profile_" + task.label;
    write_curve_csv((ctx.out / (stem + ".csv")).string(), curve);
    write_curve_json(ctx.out / (stem + ".json"), task.label, curve, ctx, taus_model);
    ctx.note("wrote " + stem + ".csv");

    json pj;
    pj["label"] = task.label;
    pj["csv"] = stem + ".csv";
    json th = json::array();
    if (k == 0) {
      // interval endpoints refined by bisection on the exact profile
      CrossingRefiner refiner =
          task.proj.kind == Projection::Kind::coordinate
              ? exact_refiner_coordinate(obj, grad, task.proj.coord, box, pc)
              : exact_refiner_projection(obj, grad, task.proj, box, pc);
      for (size_t t = 0; t < taus_model.size(); ++t)
        th.push_back(curve_threshold_json(curve, taus_model[t], ctx.cfg.taus[t], &refiner));
    } else {
      for (size_t t = 0; t < taus_model.size(); ++t)
        th.push_back(curve_threshold_json(curve, taus_model[t], ctx.cfg.taus[t]));
    }
    pj["thresholds"] = th;
    out.push_back(pj);
  }
  return out;
}

// Univariate quantile envelopes + conservative bounds for the model.
json run_uq_stage(RunContext& ctx, const GpModel& model, const std::vector<double>& taus_model) {
  json out = json::array();
  if (ctx.cfg.sims <= 0) {
    ctx.note("sims = 0: UQ stage skipped");
    return out;
  }
  const Index d = model.dim();
  const BoxDomain box = BoxDomain::unit(d);
  const double beta = ctx.cfg.beta_or_default();
  require(ctx.cfg.alpha > 2.0 * beta, "need alpha > 2*beta");

  ctx.note("selecting " + std::to_string(ctx.cfg.pilots) + " pilot points");
  const Matrix pool = sobol_pool(4096, d);
  PilotSelection sel = select_pilot_points(model, ctx.cfg.pilots, pool);
  if (sel.truncated) ctx.note("pilot selection truncated: residual variance exhausted");
  ApproxProcess proc(model, sel.pilots);
  RealizationSet reals = simulate_realizations(proc, ctx.cfg.sims, ctx.cfg.seed);
  ProfileConfig pc = profile_config(ctx);

  for (const auto& task : univariate_tasks(ctx.cfg, d)) {
    ProfileGrid grid = task.proj.kind == Projection::Kind::coordinate
                           ? grid_1d_range(box.lower[task.proj.coord],
                                           box.upper[task.proj.coord], ctx.cfg.grid_n)
                           : grid_1d(task.proj, box, ctx.cfg.grid_n);
    Objective obj = [&model](const Vector& x) { return model.posterior_mean(x); };
    GradientFn grad = [&model](const Vector& x) { return model.posterior_mean_grad(x); };
    ProfileCurve mean_curve =
        task.proj.kind == Projection::Kind::coordinate
            ? coordinate_profiles(obj, &grad, task.proj.coord, box, grid, pc)
            : oblique_profiles(obj, &grad, task.proj, box, grid, pc);

    ctx.note("uq envelope for " + task.label + " (s = " + std::to_string(ctx.cfg.sims) + ")");
    EnvelopeResult env = profile_envelope(proc, reals, task.proj, box, grid, beta, pc);
    Vector dvar = delta_var_curve(proc, task.proj, box, grid, pc);
    Vector sigma = dvar.array().max(0.0).sqrt();

    // worst observed bias of the mean path (zero for this construction up to
    // roundoff; kept for audit)
    double mu_delta_audit = 0.0;
    {
      auto wmean = proc.weights(proc.pilot_mean());
      CounterRng arng(ctx.cfg.seed, derive_stream(0xb1a5, 0));
      for (int rep = 0; rep < 64; ++rep) {
        Vector x(d);
        for (Index ii = 0; ii < d; ++ii) x[ii] = arng.uniform();
        mu_delta_audit = std::max(
            mu_delta_audit, std::abs(proc.eval(wmean, x) - model.posterior_mean(x)));
      }
    }

    BoundPair sup_b = bound_envelope(env.sup_lo, env.sup_hi, dvar, ctx.cfg.alpha, beta);
    BoundPair inf_m = bound_envelope(Vector(-env.inf_hi), Vector(-env.inf_lo), dvar,
                                     ctx.cfg.alpha, beta);
    const Vector inf_u_lo = -inf_m.u_hi;
    const Vector inf_u_hi = -inf_m.u_lo;

    EnvelopeColumns sup_cols{env.sup_lo, env.sup_hi, sup_b.u_lo, sup_b.u_hi, sigma};
    EnvelopeColumns inf_cols{env.inf_lo, env.inf_hi, inf_u_lo, inf_u_hi, sigma};
    const std::string stem = "envelope_" + task.label;
    write_envelope_csv((ctx.out / (stem + "_sup.csv")).string(), mean_curve, true, sup_cols);
    write_envelope_csv((ctx.out / (stem + "_inf.csv")).string(), mean_curve, false, inf_cols);

    json pj;
    pj["label"] = task.label;
    pj["sup_csv"] = stem + "_sup.csv";
    pj["inf_csv"] = stem + "_inf.csv";
    pj["integrated_delta_variance"] = integrated_delta_variance(dvar, grid);
    pj["mu_delta_audit"] = mu_delta_audit;
    json flagged = json::array();
    for (size_t fi = 0; fi < env.flagged.size(); ++fi)
      if (env.flagged[fi]) flagged.push_back(fi);
    pj["flagged_nodes"] = flagged;  // nodes where > 5% of realizations failed

    // Endpoint brackets: the first non-excursion boundary read off the mean
    // curve and off the two sup quantile curves (Table-style summary).
    json taus_j = json::array();
    for (size_t t = 0; t < taus_model.size(); ++t) {
      const double tau = taus_model[t];
      json tj;
      tj["tau_input"] = ctx.cfg.taus[t];
      tj["mean_non_excursion"] =
          interval_list(single_side_intervals(mean_curve.etas, mean_curve.sup, tau).non_excursion);
      tj["q_lo_non_excursion"] =
          interval_list(single_side_intervals(mean_curve.etas, env.sup_lo, tau).non_excursion);
      tj["q_hi_non_excursion"] =
          interval_list(single_side_intervals(mean_curve.etas, env.sup_hi, tau).non_excursion);
      tj["bound_non_excursion"] =
          interval_list(single_side_intervals(mean_curve.etas, sup_b.u_hi, tau).non_excursion);
      tj["mean_excursion"] =
          interval_list(single_side_intervals(mean_curve.etas, mean_curve.inf, tau).excursion);
      tj["q_excursion"] =
          interval_list(single_side_intervals(mean_curve.etas, env.inf_lo, tau).excursion);
      taus_j.push_back(tj);
    }
    pj["thresholds"] = taus_j;
    out.push_back(pj);
  }
  out[0]["pilots"] = proc.n_pilots();
  return out;
}

void write_map_json(RunContext& ctx, const std::string& stem, Index i, Index j,
                    const Projection& proj, const BoxDomain& box, const ProfileGrid& lattice,
                    const ProfileMap& map, const std::vector<double>& taus_model) {
  json j2;
  j2["projection"] = json::array({i + 1, j + 1});
  const Matrix bb = eta_bounding_box(proj, box);
  j2["grid"] = {{"shape", json::array({lattice.shape[0], lattice.shape[1]})},
                {"eta_1", json::array({bb(0, 0), bb(0, 1)})},
                {"eta_2", json::array({bb(1, 0), bb(1, 1)})}};
  j2["provenance"] = "exact";
  json th = json::array();
  for (size_t t = 0; t < taus_model.size(); ++t) {
    Index non = 0, exc = 0, und = 0;
    for (Index r = 0; r < map.sup.size(); ++r) {
      if (!map.grid.feasible[static_cast<size_t>(r)]) continue;
      if (map.sup[r] < taus_model[t]) ++non;
      else if (map.inf[r] >= taus_model[t]) ++exc;
      else ++und;
    }
    th.push_back({{"tau", taus_model[t]},
                  {"tau_input", ctx.cfg.taus[t]},
                  {"non_excursion_nodes", non},
                  {"excursion_nodes", exc},
                  {"undetermined_nodes", und}});
  }
  j2["thresholds"] = th;
  std::ofstream out(ctx.out / (stem + ".json"));
  out << j2.dump(2) << '\n';
}

json run_bivariate(RunContext& ctx, const GpModel& model, const std::vector<double>& taus_model) {
  json out = json::array();
  const Index d = model.dim();
  if (d <= 2) {
    ctx.note("bivariate stage skipped: needs d - 2 >= 1 free dimensions");
    return out;
  }
  const BoxDomain box = BoxDomain::unit(d);
  std::vector<std::pair<Index, Index>> pairs = ctx.cfg.pairs;
  if (pairs.empty()) pairs.emplace_back(0, 1);
  ProfileConfig pc = profile_config(ctx);
  Objective obj = [&model](const Vector& x) { return model.posterior_mean(x); };
  GradientFn grad = [&model](const Vector& x) { return model.posterior_mean_grad(x); };

  // shared UQ inputs for the quantile maps
  std::unique_ptr<ApproxProcess> proc;
  RealizationSet reals;
  const double beta = ctx.cfg.beta_or_default();
  if (ctx.cfg.sims > 0) {
    PilotSelection sel = select_pilot_points(model, ctx.cfg.pilots, sobol_pool(4096, d));
    proc = std::make_unique<ApproxProcess>(model, sel.pilots);
    reals = simulate_realizations(*proc, ctx.cfg.sims, ctx.cfg.seed);
  }

  for (auto [i, j] : pairs) {
    require(i >= 0 && j >= 0 && i < d && j < d && i != j, "bad bivariate pair");
    Projection proj = Projection::coordinate_pair(i, j, d);
    ProfileGrid lattice = grid_2d(proj, box, ctx.cfg.lattice_n, ctx.cfg.lattice_n);
    ctx.note("bivariate map " + std::to_string(i + 1) + "x" + std::to_string(j + 1));
    ProfileMap map = bivariate_profiles(obj, &grad, proj, box, lattice, pc);
    const std::string stem = "map_" + std::to_string(i + 1) + "_" + std::to_string(j + 1);
    write_map_csv((ctx.out / (stem + ".csv")).string(), map);
    write_map_json(ctx, stem, i, j, proj, box, lattice, map, taus_model);

    json mj;
    mj["pair"] = json::array({i + 1, j + 1});
    mj["csv"] = stem + ".csv";
    mj["json"] = stem + ".json";

    if (proc) {
      ctx.note("bivariate envelope (s = " + std::to_string(ctx.cfg.sims) + ")");
      MapEnvelopeResult env = map_envelope(*proc, reals, proj, box, lattice, beta, pc);
      Vector dvar = delta_var_lattice(*proc, proj, box, lattice, pc);
      Vector sigma(dvar.size());
      for (Index r = 0; r < dvar.size(); ++r)
        sigma[r] = std::isfinite(dvar[r]) ? std::sqrt(std::max(0.0, dvar[r])) : dvar[r];
      BoundPair sup_b = bound_envelope(env.sup_lo, env.sup_hi, dvar, ctx.cfg.alpha, beta);
      BoundPair inf_m = bound_envelope(Vector(-env.inf_hi), Vector(-env.inf_lo), dvar,
                                       ctx.cfg.alpha, beta);
      EnvelopeColumns sup_cols{env.sup_lo, env.sup_hi, sup_b.u_lo, sup_b.u_hi, sigma};
      EnvelopeColumns inf_cols{env.inf_lo, env.inf_hi, Vector(-inf_m.u_hi), Vector(-inf_m.u_lo),
                               sigma};
      write_map_envelope_csv((ctx.out / (stem + "_sup_env.csv")).string(), map, true, sup_cols);
      write_map_envelope_csv((ctx.out / (stem + "_inf_env.csv")).string(), map, false, inf_cols);
      mj["sup_env_csv"] = stem + "_sup_env.csv";
      mj["inf_env_csv"] = stem + "_inf_env.csv";
      json flagged = json::array();
      for (size_t fi = 0; fi < env.flagged.size(); ++fi)
        if (env.flagged[fi]) flagged.push_back(fi);
      mj["flagged_nodes"] = flagged;
    }

    json th = json::array();
    for (size_t t = 0; t < taus_model.size(); ++t) {
      Index below = 0, total = 0;
      for (Index r = 0; r < map.sup.size(); ++r) {
        if (!map.grid.feasible[static_cast<size_t>(r)]) continue;
        ++total;
        if (map.sup[r] < taus_model[t]) ++below;
      }
      th.push_back({{"tau_input", ctx.cfg.taus[t]},
                    {"non_excursion_nodes", below},
                    {"feasible_nodes", total}});
    }
    mj["thresholds"] = th;
    out.push_back(mj);
  }
  return out;
}

void write_summary(RunContext& ctx) {
  ctx.summary["version"] = kVersion;
  ctx.summary["mode"] = RunConfig::mode_name(ctx.cfg.mode);
  ctx.summary["seed"] = ctx.cfg.seed;
  ctx.summary["alpha"] = ctx.cfg.alpha;
  ctx.summary["beta"] = ctx.cfg.beta_or_default();
  ctx.summary["pilots"] = ctx.cfg.pilots;
  ctx.summary["sims"] = ctx.cfg.sims;
  ctx.summary["transform"] = ctx.cfg.transform;
  std::ofstream out(ctx.out / "summary.json");
  out << ctx.summary.dump(2) << '\n';
}

void emit_demo_doe(RunContext& ctx, const RegisteredFn& fn) {
  const Index n = ctx.cfg.emit_doe;
  const Matrix X = sobol_sequence(n, fn.dim);
  Matrix table(n, fn.dim + 1);
  table.leftCols(fn.dim) = X;
  const bool squared = fn.name == "synth5d";  // area-like positive output
  for (Index i = 0; i < n; ++i) {
    const double v = fn.eval(X.row(i).transpose());
    table(i, fn.dim) = squared ? v * v : v;
  }
  std::vector<std::string> header;
  for (Index j = 0; j < fn.dim; ++j) header.push_back("x" + std::to_string(j + 1));
  header.push_back("y");
  write_csv((ctx.out / "doe.csv").string(), header, table);
  ctx.note("wrote doe.csv (" + std::to_string(n) + " rows, response " +
           (squared ? "squared)" : "raw)"));
  ctx.summary["doe"] = {{"file", "doe.csv"}, {"n", n}, {"squared", squared}};
}

}  // namespace

int run(const RunConfig& cfg) {
  RunContext ctx;
  ctx.cfg = cfg;
  ctx.out = fs::path(cfg.out_dir);
  fs::create_directories(ctx.out);
  ctx.log.open(ctx.out / "run.log", std::ios::app);
  ctx.threads = cfg.threads > 0 ? cfg.threads : hardware_threads();
  if (const char* env = std::getenv("PROFEX_LOG")) ctx.verbosity = std::atoi(env);

  try {
    ctx.note("mode " + std::string(RunConfig::mode_name(cfg.mode)) + ", seed " +
             std::to_string(cfg.seed) + ", threads " + std::to_string(ctx.threads) +
             ", simd " + simd::isa_name(simd::active_isa()));
    switch (cfg.mode) {
      case RunConfig::Mode::demo: {
        const RegisteredFn& fn = find_function(cfg.function);
        ctx.summary["function"] = fn.name;
        if (cfg.emit_doe > 0) {
          emit_demo_doe(ctx, fn);
          break;
        }
        GradientFn grad = fn.grad;
        ctx.summary["profiles"] = run_univariate(ctx, fn.eval, &grad, fn.box, cfg.taus);
        if (!cfg.pairs.empty() && fn.dim > 2) {
          // exact bivariate maps of the demo function
          ProfileConfig pc = profile_config(ctx);
          for (auto [i, j] : cfg.pairs) {
            Projection proj = Projection::coordinate_pair(i, j, fn.dim);
            ProfileGrid lattice = grid_2d(proj, fn.box, cfg.lattice_n, cfg.lattice_n);
            ProfileMap map = bivariate_profiles(fn.eval, &grad, proj, fn.box, lattice, pc);
            const std::string stem =
                "map_" + std::to_string(i + 1) + "_" + std::to_string(j + 1);
            write_map_csv((ctx.out / (stem + ".csv")).string(), map);
            write_map_json(ctx, stem, i, j, proj, fn.box, lattice, map, cfg.taus);
            ctx.note("wrote " + stem + ".csv");
          }
        }
        break;
      }
      case RunConfig::Mode::fit: {
        run_fit(ctx);
        break;
      }
      case RunConfig::Mode::profile: {
        require(!cfg.model_file.empty(), "profile mode needs model=...");
        GpModel model = load_model(cfg.model_file);
        const auto taus = model_taus(ctx);
        warn_taus(ctx, model, taus);
        Objective obj = [&model](const Vector& x) { return model.posterior_mean(x); };
        GradientFn grad = [&model](const Vector& x) { return model.posterior_mean_grad(x); };
        ctx.summary["profiles"] =
            run_univariate(ctx, obj, &grad, BoxDomain::unit(model.dim()), taus);
        break;
      }
      case RunConfig::Mode::uq: {
        require(!cfg.model_file.empty(), "uq mode needs model=...");
        GpModel model = load_model(cfg.model_file);
        const auto taus = model_taus(ctx);
        warn_taus(ctx, model, taus);
        ctx.summary["uq"] = run_uq_stage(ctx, model, taus);
        break;
      }
      case RunConfig::Mode::bivariate: {
        require(!cfg.model_file.empty(), "bivariate mode needs model=...");
        GpModel model = load_model(cfg.model_file);
        ctx.summary["bivariate"] = run_bivariate(ctx, model, model_taus(ctx));
        break;
      }
      case RunConfig::Mode::pipeline: {
        GpModel model = cfg.model_file.empty() ? run_fit(ctx) : load_model(cfg.model_file);
        const auto taus = model_taus(ctx);
        warn_taus(ctx, model, taus);
        Objective obj = [&model](const Vector& x) { return model.posterior_mean(x); };
        GradientFn grad = [&model](const Vector& x) { return model.posterior_mean_grad(x); };
        ctx.summary["profiles"] =
            run_univariate(ctx, obj, &grad, BoxDomain::unit(model.dim()), taus);
        ctx.summary["uq"] = run_uq_stage(ctx, model, taus);
        ctx.summary["bivariate"] = run_bivariate(ctx, model, taus);
        break;
      }
    }
    write_summary(ctx);
    ctx.note("done");
    return 0;
  } catch (const std::exception& e) {
    ctx.note(std::string("error: ") + e.what());
    std::cerr << "profex: error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace profex
