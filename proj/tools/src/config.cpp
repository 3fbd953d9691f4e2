#include "calderon_cli/config.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>

#include "calderon/error.hpp"

namespace calderon::cli {

namespace {

Error invalid(const std::string& message) { return Error(ErrorCode::kConfigInvalid, message); }

template <typename T>
T get(const nlohmann::json& doc, const char* key, T fallback) {
  if (!doc.contains(key)) return fallback;
  try {
    return doc.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw invalid(std::string("config key '") + key + "' has the wrong type");
  }
}

void reject_unknown(const nlohmann::json& doc, const std::set<std::string>& allowed, const std::string& where) {
  for (const auto& item : doc.items()) {
    if (!allowed.count(item.key())) throw invalid("unknown key '" + item.key() + "' in " + where);
  }
}

}  // namespace

CylinderGrid ExperimentConfig::grid_for(int nt_value) const {
  std::vector<int> angular = n_angular_template;
  if (angular.empty()) angular.assign(dim - 1, nt_value - 1);
  try {
    return CylinderGrid(nt_value, angular);
  } catch (const Error& e) {
    throw invalid(std::string("invalid grid: ") + e.what());
  }
}

double ExperimentConfig::tolerance(const std::string& name, double fallback) const {
  return tolerances.contains(name) ? tolerances.at(name).get<double>() : fallback;
}

std::filesystem::path ExperimentConfig::resolve(const std::string& path) const {
  const std::filesystem::path p(path);
  return p.is_absolute() ? p : base_dir / p;
}

ExperimentConfig parse_config(const nlohmann::json& doc, const std::string& command,
                              const std::filesystem::path& base_dir) {
  if (!doc.is_object()) throw invalid("config must be a JSON object");
  reject_unknown(doc,
                 {"command", "dim", "grid", "refinements", "seed", "samples", "eps", "gamma", "mode_cut",
                  "metric", "tolerances", "params"},
                 "config");
  if (std::find(std::begin(kCommands), std::end(kCommands), command) == std::end(kCommands)) {
    throw invalid("unknown command " + command);
  }
  const auto declared = get<std::string>(doc, "command", command);
  if (declared != command) throw invalid("config is for '" + declared + "', not '" + command + "'");

  ExperimentConfig c;
  c.command = command;
  c.raw = doc;
  c.base_dir = base_dir;
  c.dim = get<int>(doc, "dim", 3);
  if (c.dim < 2 || c.dim > kMaxDim) throw invalid("dim must lie in [2, 6]");
  if (doc.contains("grid")) {
    const auto& grid = doc.at("grid");
    if (!grid.is_object()) throw invalid("grid must be an object");
    reject_unknown(grid, {"nt", "n_angular"}, "grid");
    c.nt = get<int>(grid, "nt", c.nt);
    c.n_angular_template = get<std::vector<int>>(grid, "n_angular", {});
    if (!c.n_angular_template.empty() && static_cast<int>(c.n_angular_template.size()) != c.dim - 1) {
      throw invalid("grid.n_angular needs dim - 1 entries");
    }
  }
  c.grid_for(c.nt);
  c.refinements = get<std::vector<int>>(doc, "refinements", {});
  for (int nt : c.refinements) c.grid_for(nt);
  c.seed = get<std::uint64_t>(doc, "seed", 1);
  c.samples = get<int>(doc, "samples", 5);
  if (c.samples < 1) throw invalid("samples must be positive");
  c.eps = get<std::vector<double>>(doc, "eps", {});
  for (double e : c.eps) {
    if (!(e >= 0.0)) throw invalid("eps values must be non-negative");
  }
  c.gamma = get<std::string>(doc, "gamma", "gamma1");
  try {
    boundary_from_string(c.gamma);
  } catch (const Error&) {
    throw invalid("gamma must be gamma0, gamma1 or full");
  }
  c.mode_cut = get<int>(doc, "mode_cut", 2);
  if (c.mode_cut < 0) throw invalid("mode_cut must be non-negative");
  if (doc.contains("metric")) {
    c.metric = doc.at("metric");
    if (!c.metric.is_object()) throw invalid("metric must be an object");
  }
  if (doc.contains("tolerances")) {
    c.tolerances = doc.at("tolerances");
    if (!c.tolerances.is_object()) throw invalid("tolerances must be an object");
    for (const auto& item : c.tolerances.items()) {
      if (!item.value().is_number()) throw invalid("tolerance '" + item.key() + "' must be a number");
    }
  }
  if (doc.contains("params")) {
    c.section = doc.at("params");
    if (!c.section.is_object()) throw invalid("params must be an object");
  }
  if (c.metric.value("kind", "") == "dataset") {
    reject_unknown(c.metric, {"kind", "path"}, "metric");
    const auto path = c.resolve(get<std::string>(c.metric, "path", ""));
    if (!std::filesystem::is_regular_file(path)) throw invalid("metric dataset not found: " + path.string());
  } else {
    metric_from_spec(c.metric, c.dim);
  }
  if (c.section.contains("dataset") && c.section.at("dataset").is_string() &&
      c.section.at("dataset").get<std::string>() != "zero") {
    const auto path = c.resolve(c.section.at("dataset").get<std::string>());
    if (!std::filesystem::is_regular_file(path)) throw invalid("dataset not found: " + path.string());
  }
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path, const std::string& command) {
  std::ifstream in(path);
  if (!in) throw invalid("cannot read config " + path.string());
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw invalid(std::string("config is not valid JSON: ") + e.what());
  }
  return parse_config(doc, command, path.parent_path());
}

std::string digest(const nlohmann::json& doc) {
  std::uint64_t hash = 14695981039346656037ULL;
  for (unsigned char ch : doc.dump()) {
    hash ^= ch;
    hash *= 1099511628211ULL;
  }
  char buffer[17];
  std::snprintf(buffer, sizeof buffer, "%016llx", static_cast<unsigned long long>(hash));
  return buffer;
}

MetricSource metric_from_spec(const nlohmann::json& spec, int dim) {
  const auto kind = get<std::string>(spec, "kind", "flat");
  if (kind == "flat") {
    reject_unknown(spec, {"kind"}, "metric");
    return flat_metric(dim);
  }
  if (kind == "constant") {
    reject_unknown(spec, {"kind", "matrix"}, "metric");
    const auto rows = get<std::vector<std::vector<double>>>(spec, "matrix", {});
    if (static_cast<int>(rows.size()) != dim) throw invalid("metric.matrix must be dim x dim");
    SymMatrix g(dim, dim);
    for (int i = 0; i < dim; ++i) {
      if (static_cast<int>(rows[i].size()) != dim) throw invalid("metric.matrix must be dim x dim");
      for (int j = 0; j < dim; ++j) g(i, j) = rows[i][j];
    }
    return constant_metric(g);
  }
  if (kind == "random_smooth") {
    reject_unknown(spec, {"kind", "seed", "amplitude", "terms"}, "metric");
    const double amplitude = get<double>(spec, "amplitude", 0.3);
    if (!(amplitude >= 0.0 && amplitude < 1.0)) throw invalid("metric.amplitude must lie in [0, 1)");
    return random_smooth_metric(dim, get<std::uint64_t>(spec, "seed", 1), amplitude, get<int>(spec, "terms", 3));
  }
  throw invalid("unknown metric kind " + kind);
}

CylinderDiffeo diffeo_from_spec(const nlohmann::json& spec, int dim) {
  if (!spec.is_object()) throw invalid("diffeo must be an object");
  reject_unknown(spec, {"collar_delta", "s_spec", "shear_spec"}, "diffeo");
  const double delta = get<double>(spec, "collar_delta", 0.1);
  const nlohmann::json s = get<nlohmann::json>(spec, "s_spec", nlohmann::json{{"family", "identity"}});
  const nlohmann::json shear = get<nlohmann::json>(spec, "shear_spec", nlohmann::json{{"family", "none"}});
  try {
    CylinderDiffeo phi = CylinderDiffeo::reparametrization(dim, get<std::string>(s, "family", "identity"),
                                                           get<double>(s, "amplitude", 0.0), delta);
    const auto shear_family = get<std::string>(shear, "family", "none");
    if (shear_family == "bump") {
      phi = phi.with_bump_shear(get<std::vector<double>>(shear, "amplitudes", std::vector<double>(dim - 1, 0.0)));
    } else if (shear_family != "none") {
      throw invalid("unknown shear family " + shear_family);
    }
    return phi;
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kConfigInvalid) throw;
    throw invalid(std::string("invalid diffeo: ") + e.what());
  }
}

SynthParams synth_params_from_spec(const nlohmann::json& spec) {
  if (!spec.is_object()) throw invalid("synth must be an object");
  reject_unknown(spec, {"nt", "n_angular", "T", "rho", "alpha", "amplitude", "modes", "ridge", "iterations"},
                 "synth");
  SynthParams p;
  p.nt = get<int>(spec, "nt", p.nt);
  p.n_angular = get<std::vector<int>>(spec, "n_angular", std::vector<int>{p.nt - 1, p.nt - 1});
  p.T = get<double>(spec, "T", p.T);
  p.rho = get<double>(spec, "rho", p.rho);
  p.alpha = get<double>(spec, "alpha", p.alpha);
  p.amplitude = get<double>(spec, "amplitude", p.amplitude);
  p.ridge = get<double>(spec, "ridge", p.ridge);
  p.iterations = get<int>(spec, "iterations", p.iterations);
  if (spec.contains("modes")) {
    p.modes.clear();
    for (const auto& m : spec.at("modes")) {
      reject_unknown(m, {"kx", "ky", "phase", "weight"}, "synth.modes");
      p.modes.push_back({get<int>(m, "kx", 1), get<int>(m, "ky", 0), get<double>(m, "phase", 0.0),
                         get<double>(m, "weight", 1.0)});
    }
  }
  if (!(p.T > 0.0 && p.T <= 1.0) || !(p.alpha > 0.0 && p.alpha < 1.0) || !(p.rho > 0.0 && p.rho < 1.0)) {
    throw invalid("synth needs T in (0, 1], alpha and rho in (0, 1)");
  }
  return p;
}

}  // namespace calderon::cli
