#pragma once

#include "calderon_cli/config.hpp"
#include "calderon_cli/report.hpp"

namespace calderon::cli {

/// Dispatches on config.command. Computational errors propagate as calderon::Error.
ExperimentReport run(const ExperimentConfig& config);

ExperimentReport run_verify_identities(const ExperimentConfig& config);
ExperimentReport run_dn_compare(const ExperimentConfig& config);
ExperimentReport run_counterexample_study(const ExperimentConfig& config);
ExperimentReport run_validate_dataset(const ExperimentConfig& config);
ExperimentReport run_synth_dataset(const ExperimentConfig& config);
ExperimentReport run_rigidity_check(const ExperimentConfig& config);

/// Observed orders log(e_k / e_{k+1}) / log(h_k / h_{k+1}) for consecutive levels.
std::vector<double> observed_orders(const std::vector<double>& errors, const std::vector<double>& h);

}  // namespace calderon::cli
