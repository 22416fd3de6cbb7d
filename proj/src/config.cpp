#include "profex/config.hpp"

#include <fstream>
#include <sstream>

namespace profex {

RunConfig::Mode RunConfig::mode_from_name(const std::string& s) {
  if (s == "fit") return Mode::fit;
  if (s == "profile" || s == "profiles") return Mode::profile;
  if (s == "uq" || s == "uq-profiles") return Mode::uq;
  if (s == "bivariate") return Mode::bivariate;
  if (s == "pipeline" || s == "full-pipeline") return Mode::pipeline;
  if (s == "demo") return Mode::demo;
  throw std::invalid_argument("unknown mode: " + s);
}

const char* RunConfig::mode_name(Mode m) {
  switch (m) {
    case Mode::fit: return "fit";
    case Mode::profile: return "profile";
    case Mode::uq: return "uq";
    case Mode::bivariate: return "bivariate";
    case Mode::pipeline: return "pipeline";
    case Mode::demo: return "demo";
  }
  return "?";
}

namespace {

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r");
  size_t b = s.find_last_not_of(" \t\r");
  if (a == std::string::npos) return "";
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : s) {
    if (ch == sep) {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur += ch;
    }
  }
  if (!trim(cur).empty() || !out.empty()) out.push_back(trim(cur));
  return out;
}

std::vector<double> parse_reals(const std::string& v) {
  std::vector<double> out;
  for (const auto& tok : split(v, ',')) {
    if (tok.empty()) continue;
    out.push_back(std::stod(tok));
  }
  return out;
}

}  // namespace

void apply_config_entry(RunConfig& cfg, const std::string& key, const std::string& value) {
  const std::string v = trim(value);
  if (key == "mode") {
    cfg.mode = RunConfig::mode_from_name(v);
  } else if (key == "function") {
    cfg.function = v;
  } else if (key == "doe" || key == "doe_csv" || key == "input") {
    cfg.doe_csv = v;
  } else if (key == "model" || key == "model_file") {
    cfg.model_file = v;
  } else if (key == "tau" || key == "thresholds") {
    cfg.taus = parse_reals(v);
    require(!cfg.taus.empty(), "config: empty threshold list");
  } else if (key == "transform") {
    require(v == "none" || v == "sqrt", "config: transform must be none or sqrt");
    cfg.transform = v;
  } else if (key == "coords" || key == "coordinates") {
    cfg.coords.clear();
    for (double x : parse_reals(v)) cfg.coords.push_back(static_cast<Index>(x) - 1);
  } else if (key == "direction" || key == "psi") {
    cfg.oblique_dirs.push_back(parse_reals(v));
  } else if (key == "pair" || key == "pairs") {
    for (const auto& tok : split(v, ';')) {
      if (tok.empty()) continue;
      auto ij = parse_reals(tok);
      require(ij.size() == 2, "config: a pair needs two coordinates");
      cfg.pairs.emplace_back(static_cast<Index>(ij[0]) - 1, static_cast<Index>(ij[1]) - 1);
    }
  } else if (key == "grid") {
    cfg.grid_n = std::stoi(v);
  } else if (key == "lattice") {
    cfg.lattice_n = std::stoi(v);
  } else if (key == "k" || key == "approx_knots") {
    // 0 = exact profiles; auto = ceil(10 sqrt(d)) knots; n >= 4 = that many
    cfg.k_approx = (v == "auto") ? -1 : std::stoi(v);
  } else if (key == "pilots" || key == "l") {
    cfg.pilots = std::stol(v);
  } else if (key == "sims" || key == "s") {
    cfg.sims = std::stol(v);
  } else if (key == "alpha") {
    cfg.alpha = std::stod(v);
  } else if (key == "beta") {
    cfg.beta = std::stod(v);
  } else if (key == "starts") {
    cfg.n_starts = std::stoi(v);
  } else if (key == "seed") {
    cfg.seed = std::stoull(v);
  } else if (key == "threads") {
    cfg.threads = std::stoi(v);
  } else if (key == "out" || key == "out_dir") {
    cfg.out_dir = v;
  } else if (key == "kernel") {
    cfg.kernel_family = v;
  } else if (key == "structure") {
    cfg.kernel_structure = v;
  } else if (key == "trend") {
    cfg.trend = v;
  } else if (key == "fit_starts") {
    cfg.fit_starts = std::stoi(v);
  } else if (key == "emit_doe") {
    cfg.emit_doe = std::stoi(v);
  } else {
    throw std::invalid_argument("config: unknown key '" + key + "'");
  }
}

RunConfig read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("config: cannot open " + path);
  RunConfig cfg;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#' || t[0] == ';') continue;
    if (t.front() == '[' && t.back() == ']') continue;  // section headers are cosmetic
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": expected key=value");
    try {
      apply_config_entry(cfg, trim(t.substr(0, eq)), trim(t.substr(eq + 1)));
    } catch (const std::exception& e) {
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return cfg;
}

}  // namespace profex
