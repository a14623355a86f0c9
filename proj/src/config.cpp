#include "bosons/config.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

namespace bosons {

std::string experiment_name(Experiment e) {
  switch (e) {
    case Experiment::Scatter:
      return "scatter";
    case Experiment::Spectrum:
      return "spectrum";
    case Experiment::Decay:
      return "decay";
    case Experiment::Ldp:
      return "ldp";
    case Experiment::Gibbs:
      return "gibbs";
    case Experiment::Verify:
      return "verify";
  }
  return "?";
}

Experiment experiment_from_name(const std::string& name) {
  for (Experiment e : {Experiment::Scatter, Experiment::Spectrum, Experiment::Decay,
                       Experiment::Ldp, Experiment::Gibbs, Experiment::Verify}) {
    if (experiment_name(e) == name) return e;
  }
  throw ValidationError("unknown experiment '" + name + "'");
}

PotentialSpec RunConfig::potential_spec() const {
  if (potential == "zero") return PotentialSpec::zero();
  if (potential == "square_well") return PotentialSpec::square_well(V0, R);
  if (potential == "cosine_bump") return PotentialSpec::cosine_bump(V0, R);
  throw ValidationError("unknown potential kind '" + potential + "'");
}

ModelConfig RunConfig::model_config() const { return model_config_for(N); }

ModelConfig RunConfig::model_config_for(int particles) const {
  ModelConfig m;
  m.lattice = MomentumLattice::enumerate_modes(cutoff_kind, cutoff);
  m.N = particles;
  m.beta = beta_scaling;
  m.spec = potential_spec();
  if (prefactor == "over_n") m.convention = PrefactorConvention::OverN;
  if (prefactor == "over_n_minus_1") m.convention = PrefactorConvention::OverNMinus1;
  m.cap = cap;
  m.dimension_budget = budget;
  return m;
}

namespace {

struct Parser {
  std::vector<std::string> errors;

  void fail(int line, const std::string& msg) {
    errors.push_back("line " + std::to_string(line) + ": " + msg);
  }

  static std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
  }

  bool to_double(int line, const std::string& key, const std::string& v, double& out) {
    try {
      size_t pos = 0;
      out = std::stod(v, &pos);
      if (pos != v.size()) throw std::invalid_argument("trailing");
      return true;
    } catch (...) {
      fail(line, key + ": expected a number, got '" + v + "'");
      return false;
    }
  }
  bool to_int(int line, const std::string& key, const std::string& v, long& out) {
    try {
      size_t pos = 0;
      out = std::stol(v, &pos);
      if (pos != v.size()) throw std::invalid_argument("trailing");
      return true;
    } catch (...) {
      fail(line, key + ": expected an integer, got '" + v + "'");
      return false;
    }
  }
  bool to_u64(int line, const std::string& key, const std::string& v, std::uint64_t& out) {
    try {
      size_t pos = 0;
      out = std::stoull(v, &pos);
      if (pos != v.size()) throw std::invalid_argument("trailing");
      return true;
    } catch (...) {
      fail(line, key + ": expected an unsigned integer, got '" + v + "'");
      return false;
    }
  }
  bool to_double_list(int line, const std::string& key, const std::string& v,
                      std::vector<double>& out) {
    out.clear();
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
      item = trim(item);
      if (item.empty()) continue;
      double x;
      if (!to_double(line, key, item, x)) return false;
      out.push_back(x);
    }
    if (out.empty()) fail(line, key + ": empty list");
    return !out.empty();
  }
  bool to_int_list(int line, const std::string& key, const std::string& v,
                   std::vector<int>& out) {
    out.clear();
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
      item = trim(item);
      if (item.empty()) continue;
      long x;
      if (!to_int(line, key, item, x)) return false;
      out.push_back(static_cast<int>(x));
    }
    if (out.empty()) fail(line, key + ": empty list");
    return !out.empty();
  }
  bool to_string_list(const std::string& v, std::vector<std::string>& out) {
    out.clear();
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
      item = trim(item);
      if (!item.empty()) out.push_back(item);
    }
    return true;
  }
};

int edit_distance(const std::string& a, const std::string& b) {
  std::vector<std::vector<int>> d(a.size() + 1, std::vector<int>(b.size() + 1, 0));
  for (size_t i = 0; i <= a.size(); ++i) d[i][0] = static_cast<int>(i);
  for (size_t j = 0; j <= b.size(); ++j) d[0][j] = static_cast<int>(j);
  for (size_t i = 1; i <= a.size(); ++i) {
    for (size_t j = 1; j <= b.size(); ++j) {
      const int sub = d[i - 1][j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      d[i][j] = std::min({d[i - 1][j] + 1, d[i][j - 1] + 1, sub});
    }
  }
  return d[a.size()][b.size()];
}

const std::vector<std::string>& known_keys() {
  static const std::vector<std::string> keys = {
      "experiment",
      "seed",
      "model.N",
      "model.beta",
      "model.cutoff_kind",
      "model.cutoff",
      "model.potential",
      "model.V0",
      "model.R",
      "model.cap",
      "model.prefactor",
      "model.budget",
      "scattering.ell",
      "scattering.ode_tol",
      "scattering.N",
      "statistics.kappa_grid",
      "statistics.lambda_grid",
      "statistics.x_grid",
      "statistics.n_sweep",
      "statistics.gibbs_beta",
      "statistics.onsager_offset",
      "output.directory",
      "output.formats",
  };
  return keys;
}

std::string nearest_key(const std::string& key) {
  int best = 1 << 20;
  std::string candidate;
  for (const auto& k : known_keys()) {
    const int d = edit_distance(key, k);
    if (d < best) {
      best = d;
      candidate = k;
    }
  }
  return candidate;
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  RunConfig cfg;
  Parser p;
  std::istringstream in(text);
  std::string raw;
  std::string section;
  int line_no = 0;

  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = Parser::trim(raw);
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = Parser::trim(line.substr(0, hash));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        p.fail(line_no, "malformed section header '" + line + "'");
        continue;
      }
      section = Parser::trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      p.fail(line_no, "expected 'key = value', got '" + line + "'");
      continue;
    }
    const std::string key_local = Parser::trim(line.substr(0, eq));
    const std::string value = Parser::trim(line.substr(eq + 1));
    const std::string key = section.empty() ? key_local : section + "." + key_local;

    long tmp_l = 0;
    if (key == "experiment") {
      try {
        cfg.experiment = experiment_from_name(value);
      } catch (const ValidationError& e) {
        p.fail(line_no, e.what());
      }
    } else if (key == "seed") {
      p.to_u64(line_no, key, value, cfg.seed);
    } else if (key == "model.N") {
      if (p.to_int(line_no, key, value, tmp_l)) cfg.N = static_cast<int>(tmp_l);
    } else if (key == "model.beta") {
      p.to_double(line_no, key, value, cfg.beta_scaling);
    } else if (key == "model.cutoff_kind") {
      if (value == "euclidean") {
        cfg.cutoff_kind = CutoffKind::Euclidean;
      } else if (value == "sup") {
        cfg.cutoff_kind = CutoffKind::SupNorm;
      } else {
        p.fail(line_no, "model.cutoff_kind: expected euclidean|sup, got '" + value + "'");
      }
    } else if (key == "model.cutoff") {
      if (p.to_int(line_no, key, value, tmp_l)) cfg.cutoff = static_cast<int>(tmp_l);
    } else if (key == "model.potential") {
      cfg.potential = value;
    } else if (key == "model.V0") {
      p.to_double(line_no, key, value, cfg.V0);
    } else if (key == "model.R") {
      p.to_double(line_no, key, value, cfg.R);
    } else if (key == "model.cap") {
      if (p.to_int(line_no, key, value, tmp_l)) cfg.cap = static_cast<int>(tmp_l);
    } else if (key == "model.prefactor") {
      if (value != "regime" && value != "over_n" && value != "over_n_minus_1") {
        p.fail(line_no, "model.prefactor: expected regime|over_n|over_n_minus_1");
      } else {
        cfg.prefactor = value;
      }
    } else if (key == "model.budget") {
      if (p.to_int(line_no, key, value, tmp_l)) cfg.budget = tmp_l;
    } else if (key == "scattering.ell") {
      p.to_double(line_no, key, value, cfg.ell);
    } else if (key == "scattering.ode_tol") {
      p.to_double(line_no, key, value, cfg.ode_tol);
    } else if (key == "scattering.N") {
      if (p.to_int(line_no, key, value, tmp_l)) cfg.scatter_N = static_cast<int>(tmp_l);
    } else if (key == "statistics.kappa_grid") {
      p.to_double_list(line_no, key, value, cfg.kappa_grid);
    } else if (key == "statistics.lambda_grid") {
      p.to_double_list(line_no, key, value, cfg.lambda_grid);
    } else if (key == "statistics.x_grid") {
      p.to_double_list(line_no, key, value, cfg.x_grid);
    } else if (key == "statistics.n_sweep") {
      p.to_int_list(line_no, key, value, cfg.n_sweep);
    } else if (key == "statistics.gibbs_beta") {
      p.to_double(line_no, key, value, cfg.gibbs_beta);
    } else if (key == "statistics.onsager_offset") {
      p.to_double(line_no, key, value, cfg.onsager_offset);
    } else if (key == "output.directory") {
      cfg.out_dir = value;
    } else if (key == "output.formats") {
      p.to_string_list(value, cfg.formats);
    } else {
      p.fail(line_no, "unknown key '" + key + "' (nearest valid key: '" + nearest_key(key) + "')");
    }
  }

  // semantic validation, all collected
  if (cfg.N < 2) p.errors.push_back("model.N: must be >= 2 (got " + std::to_string(cfg.N) + ")");
  if (cfg.beta_scaling < 0.0 || cfg.beta_scaling > 1.0)
    p.errors.push_back("model.beta: must lie in [0,1]");
  if (cfg.cutoff < 1) p.errors.push_back("model.cutoff: must be >= 1");
  if (cfg.cap >= 0 && cfg.cap > cfg.N) p.errors.push_back("model.cap: must satisfy cap <= N");
  if (cfg.potential != "zero" && cfg.potential != "square_well" && cfg.potential != "cosine_bump")
    p.errors.push_back("model.potential: expected zero|square_well|cosine_bump");
  if (cfg.potential != "zero") {
    if (cfg.V0 < 0.0) p.errors.push_back("model.V0: must be >= 0");
    if (!(cfg.R > 0.0 && cfg.R < 0.5)) p.errors.push_back("model.R: must satisfy 0 < R < 1/2");
    if (!(cfg.ell > cfg.R && cfg.ell < 0.5))
      p.errors.push_back(
          "scattering.ell: the ball radius must satisfy R < ell < 1/2 (support inside the ball)");
  } else if (!(cfg.ell > 0.0 && cfg.ell < 0.5)) {
    p.errors.push_back("scattering.ell: must satisfy 0 < ell < 1/2");
  }
  if (cfg.scatter_N < 2) p.errors.push_back("scattering.N: must be >= 2");
  if (!(cfg.ode_tol > 0.0)) p.errors.push_back("scattering.ode_tol: must be positive");
  if (!(cfg.gibbs_beta > 0.0)) p.errors.push_back("statistics.gibbs_beta: must be positive");
  for (int n : cfg.n_sweep) {
    if (n < 2) p.errors.push_back("statistics.n_sweep: every entry must be >= 2");
  }
  for (const auto& f : cfg.formats) {
    if (f != "csv" && f != "json") p.errors.push_back("output.formats: expected csv|json");
  }

  if (!p.errors.empty()) {
    std::string joined = "config invalid (" + std::to_string(p.errors.size()) + " problem(s)):";
    for (const auto& e : p.errors) joined += "\n  - " + e;
    throw ValidationError(joined);
  }
  return cfg;
}

}  // namespace bosons
