#include "calderon/metric.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include "calderon/error.hpp"
#include "calderon/parallel.hpp"

namespace calderon {

MatrixField::MatrixField(CylinderGrid grid, std::vector<SymMatrix> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  if (values_.size() != grid_.size()) {
    throw Error(ErrorCode::kShapeMismatch, "matrix field size does not match grid");
  }
}

EllipticityBounds symmetric_eigen_bounds(const SymMatrix& m) {
  Eigen::SelfAdjointEigenSolver<SymMatrix> solver(m, Eigen::EigenvaluesOnly);
  const auto& ev = solver.eigenvalues();
  return {ev.minCoeff(), ev.maxCoeff()};
}

namespace {

void validate_node(SymMatrix& g, std::size_t node) {
  const int n = static_cast<int>(g.rows());
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (!(std::abs(g(i, j) - g(j, i)) <= kExactTol)) {
        throw Error(ErrorCode::kAsymmetric, "metric sample is not symmetric", node);
      }
      const double avg = 0.5 * (g(i, j) + g(j, i));
      g(i, j) = avg;
      g(j, i) = avg;
    }
  }
  if (!g.allFinite()) {
    throw Error(ErrorCode::kNonPositiveDefinite, "metric sample is not finite", node);
  }
  if (n > 4) {
    // Gershgorin certificate first; the exact solve only when inconclusive.
    double lo = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i) {
      double radius = 0.0;
      for (int j = 0; j < n; ++j) {
        if (j != i) radius += std::abs(g(i, j));
      }
      lo = std::min(lo, g(i, i) - radius);
    }
    if (lo > 0.0) return;
  }
  Eigen::SelfAdjointEigenSolver<SymMatrix> solver(g, Eigen::EigenvaluesOnly);
  if (!(solver.eigenvalues().minCoeff() > 0.0)) {
    throw Error(ErrorCode::kNonPositiveDefinite, "metric sample has a non-positive eigenvalue",
                node);
  }
}

}  // namespace

MetricField MetricField::from_samples(CylinderGrid grid, std::vector<SymMatrix> samples,
                                      std::string id) {
  if (samples.size() != grid.size()) {
    throw Error(ErrorCode::kShapeMismatch, "metric sample count does not match grid");
  }
  const int n = grid.dim();
  MetricField field(std::move(grid), std::move(id));
  const std::size_t count = samples.size();
  field.inverse_.resize(count);
  field.det_.resize(count);
  field.sqrt_det_.resize(count);
  for (std::size_t node = 0; node < count; ++node) {
    if (samples[node].rows() != n || samples[node].cols() != n) {
      throw Error(ErrorCode::kShapeMismatch, "metric sample has wrong dimension", node);
    }
    validate_node(samples[node], node);
  }
  parallel_for(count, [&](std::size_t node) {
    const SymMatrix& g = samples[node];
    field.det_[node] = g.determinant();
    field.sqrt_det_[node] = std::sqrt(field.det_[node]);
    field.inverse_[node] = g.inverse();
  });
  field.metric_ = std::move(samples);
  return field;
}

MetricField MetricField::with_source(std::shared_ptr<const MetricSource> source) const {
  MetricField copy = *this;
  copy.source_ = std::move(source);
  return copy;
}

SymMatrix MetricField::evaluate(const Point& p) const {
  if (source_) return source_->value(p);
  const int n = dim();
  SymMatrix g = SymMatrix::Zero(n, n);
  for (const auto& [node, w] : grid_.interpolation_stencil(p)) g += w * metric_[node];
  return g;
}

MetricField sample_metric(const MetricSource& source, const CylinderGrid& grid) {
  if (source.dim != grid.dim()) {
    throw Error(ErrorCode::kShapeMismatch, "metric source dimension does not match grid");
  }
  std::vector<SymMatrix> samples(grid.size());
  parallel_for(grid.size(), [&](std::size_t node) { samples[node] = source.value(grid.point(node)); });
  auto field = MetricField::from_samples(grid, std::move(samples), source.id);
  return field.with_source(std::make_shared<const MetricSource>(source));
}

EllipticityBounds ellipticity_constants(const MetricField& metric) {
  EllipticityBounds bounds{std::numeric_limits<double>::infinity(),
                           -std::numeric_limits<double>::infinity()};
  for (std::size_t node = 0; node < metric.grid().size(); ++node) {
    const auto b = symmetric_eigen_bounds(metric.metric(node));
    bounds.lambda_min = std::min(bounds.lambda_min, b.lambda_min);
    bounds.lambda_max = std::max(bounds.lambda_max, b.lambda_max);
  }
  return bounds;
}

MatrixField weight_field(const MetricField& metric) {
  std::vector<SymMatrix> values(metric.grid().size());
  for (std::size_t node = 0; node < values.size(); ++node) {
    values[node] = metric.sqrt_det(node) * metric.inverse(node);
  }
  return MatrixField(metric.grid(), std::move(values));
}

}  // namespace calderon
