#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "calderon/analytic.hpp"
#include "calderon/counterexample.hpp"
#include "calderon/gauge.hpp"
#include "calderon/grid.hpp"

namespace calderon::cli {

inline constexpr const char* kCommands[] = {"verify-identities",    "dn-compare",
                                            "counterexample-study", "validate-dataset",
                                            "synth-dataset",        "rigidity-check"};

/// Parsed experiment description. Unknown keys are rejected so typos do
/// not silently fall back to defaults.
struct ExperimentConfig {
  std::string command;
  nlohmann::json raw;
  std::filesystem::path base_dir;
  std::filesystem::path output_dir = "calderon-out";

  int dim = 3;
  std::vector<int> n_angular_template;  // empty means N_ang = N_t - 1 in every direction
  int nt = 9;
  std::vector<int> refinements;
  std::uint64_t seed = 1;
  int samples = 5;
  std::vector<double> eps;
  std::string gamma = "gamma1";
  int mode_cut = 2;
  nlohmann::json metric = {{"kind", "flat"}};
  nlohmann::json tolerances = nlohmann::json::object();
  nlohmann::json section = nlohmann::json::object();

  CylinderGrid grid_for(int nt_value) const;
  double tolerance(const std::string& name, double fallback) const;
  std::filesystem::path resolve(const std::string& path) const;
};

/// Throws calderon::Error with ConfigInvalid on schema errors.
ExperimentConfig parse_config(const nlohmann::json& doc, const std::string& command,
                              const std::filesystem::path& base_dir);
ExperimentConfig load_config(const std::filesystem::path& path, const std::string& command);

/// 64-bit FNV-1a of the canonical JSON text, as 16 hex digits.
std::string digest(const nlohmann::json& doc);

MetricSource metric_from_spec(const nlohmann::json& spec, int dim);
CylinderDiffeo diffeo_from_spec(const nlohmann::json& spec, int dim);
SynthParams synth_params_from_spec(const nlohmann::json& spec);

}  // namespace calderon::cli
