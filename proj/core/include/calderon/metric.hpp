#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "calderon/grid.hpp"
#include "calderon/types.hpp"

namespace calderon {

/// Analytic metric: point -> symmetric positive-definite matrix, with
/// optional first partial derivatives. All angular arguments are
/// 2pi-periodic.
struct MetricSource {
  int dim = 0;
  std::function<SymMatrix(const Point&)> value;
  /// d g / d x^axis; may be empty.
  std::function<SymMatrix(const Point&, int axis)> derivative;
  std::string id = "metric";

  bool has_derivative() const { return static_cast<bool>(derivative); }
  SymMatrix operator()(const Point& p) const { return value(p); }
};

/// Per-node matrices on a grid (e.g. the divergence-form weight sqrt|g| g^{-1}).
class MatrixField {
 public:
  MatrixField(CylinderGrid grid, std::vector<SymMatrix> values);

  const CylinderGrid& grid() const { return grid_; }
  const SymMatrix& operator[](std::size_t node) const { return values_[node]; }
  std::size_t size() const { return values_.size(); }

 private:
  CylinderGrid grid_;
  std::vector<SymMatrix> values_;
};

/// Node samples of a metric with cached determinant and inverse.
///
/// Construction validates symmetry (1e-12) and positive definiteness at
/// every node. When built from an analytic source the source is kept so
/// that quadrature can evaluate the metric exactly off the nodes.
class MetricField {
 public:
  static MetricField from_samples(CylinderGrid grid, std::vector<SymMatrix> samples,
                                  std::string id = "samples");

  const CylinderGrid& grid() const { return grid_; }
  int dim() const { return grid_.dim(); }
  const std::string& id() const { return id_; }

  const SymMatrix& metric(std::size_t node) const { return metric_[node]; }
  const SymMatrix& inverse(std::size_t node) const { return inverse_[node]; }
  double det(std::size_t node) const { return det_[node]; }
  double sqrt_det(std::size_t node) const { return sqrt_det_[node]; }

  const MetricSource* source() const { return source_.get(); }
  bool has_source() const { return source_ != nullptr; }
  /// Copy of this field with the analytic source attached (or detached when null).
  MetricField with_source(std::shared_ptr<const MetricSource> source) const;
  MetricField without_source() const { return with_source(nullptr); }

  /// Metric at an arbitrary point: analytic when a source is attached,
  /// multilinear interpolation of the node samples otherwise.
  SymMatrix evaluate(const Point& p) const;

 private:
  MetricField(CylinderGrid grid, std::string id) : grid_(std::move(grid)), id_(std::move(id)) {}

  CylinderGrid grid_;
  std::string id_;
  std::vector<SymMatrix> metric_;
  std::vector<SymMatrix> inverse_;
  std::vector<double> det_;
  std::vector<double> sqrt_det_;
  std::shared_ptr<const MetricSource> source_;
};

/// Samples an analytic metric on the grid, keeping the source for quadrature.
MetricField sample_metric(const MetricSource& source, const CylinderGrid& grid);

struct EllipticityBounds {
  double lambda_min;
  double lambda_max;
};

/// Global extreme eigenvalues over all nodes.
EllipticityBounds ellipticity_constants(const MetricField& metric);

/// Extreme eigenvalues of one symmetric matrix.
EllipticityBounds symmetric_eigen_bounds(const SymMatrix& m);

/// sqrt|g| g^{ij} at every node.
MatrixField weight_field(const MetricField& metric);

}  // namespace calderon
