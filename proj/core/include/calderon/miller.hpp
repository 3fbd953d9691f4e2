#pragma once

#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "calderon/calculus.hpp"
#include "calderon/grid.hpp"
#include "calderon/metric.hpp"

namespace calderon {

/// Coefficients and solution of a divergence-form equation on [0,1] x T^2
/// in the layout of Miller's non-unique-continuation example.
struct MillerDataset {
  CylinderGrid grid{3, {4, 4}};
  std::vector<double> a1, a2, a3, u;  // node fields
  std::vector<double> A1, A3;         // one value per t layer
  double T = 1.0;
  double rho = 1.0 / 6.0;
  double alpha = 0.5;

  static MillerDataset zeros(const CylinderGrid& grid, double T, double rho, double alpha);
  /// Throws ShapeMismatch when array sizes disagree with the grid.
  void check_shapes() const;
  /// Keeps every factor-th node in every direction.
  MillerDataset subsampled(int factor) const;
};

/// diag(1, [[1+a1+A1, a2], [a2, 1+a3+A3]]) at one node.
SymMatrix miller_matrix(const MillerDataset& data, std::size_t node);
MatrixField miller_weight_field(const MillerDataset& data);

/// D dt^2 + (1+a3+A3) dx^2 - 2 a2 dx dy + (1+a1+A1) dy^2.
MetricField assemble_counterexample_metric_3d(const MillerDataset& data, const CylinderGrid& grid);

/// D^{1/(n-2)} (dt^2 + D^{-1}((1+A3+a3) dx1^2 - 2 a2 dx1 dx2 + (1+A1+a1) dx2^2)
/// + sum_{i>=3} dx_i^2); the first three axes of `grid` must match the dataset.
MetricField assemble_counterexample_metric_nd(const MillerDataset& data, const CylinderGrid& grid);

/// Extends a field on the dataset grid to an n-D grid, constant in x_3..x_{n-1}.
ScalarField lift_to_grid(const MillerDataset& data, const std::vector<double>& field,
                         const CylinderGrid& grid);

/// max over nodes and entries of |sqrt|g| g^{ij} - A^{ij}|.
double weight_identity_check(const MillerDataset& data, const CylinderGrid& grid);

/// sum_i d_i(A^{ij} d_j u) by the flux stencil (zero on the t = 0, 1 layers).
ScalarField miller_residual(const MillerDataset& data);

struct ResidualNorms {
  double max;
  double l2;  // quadrature-weighted
};
ResidualNorms residual_norms(const ScalarField& r);

/// max_{i<j} |A_i - A_j| / |t_i - t_j|^rho over the given t samples.
double holder_quotient(const std::vector<double>& values, const std::vector<double>& t, double rho);

struct CheckResult {
  std::string item;
  std::string status;  // pass | warn | fail
  std::string code;    // e.g. VanishingViolated; empty on pass
  std::string detail;
  std::map<std::string, double> values;
};

struct ValidationReport {
  std::vector<CheckResult> checks;

  bool passed() const;
  const CheckResult* find(const std::string& item) const;
  nlohmann::json to_json() const;
};

struct ValidationOptions {
  double vanishing_tol = 1e-12;
  /// Largest accepted growth of H(rho) from the coarsest to the finest subsampling.
  double holder_growth_limit = 1.5;
  /// Residual (max norm) above which item 5 is reported as a warning.
  double residual_tol = 1e-8;
};

ValidationReport validate_miller_properties(const MillerDataset& data,
                                            const ValidationOptions& options = {});

}  // namespace calderon
