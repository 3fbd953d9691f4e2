#pragma once

#include <memory>
#include <vector>

#include "calderon/analytic.hpp"
#include "calderon/grid.hpp"
#include "calderon/metric.hpp"
#include "calderon/types.hpp"

namespace calderon {

/// Node values on a grid, optionally backed by an analytic source.
class ScalarField {
 public:
  ScalarField(CylinderGrid grid, std::vector<double> values,
              std::shared_ptr<const ScalarSource> source = nullptr);

  static ScalarField sample(const ScalarSource& source, const CylinderGrid& grid);
  static ScalarField constant(const CylinderGrid& grid, double value);

  const CylinderGrid& grid() const { return grid_; }
  const std::vector<double>& values() const { return values_; }
  std::vector<double>& values() { return values_; }
  double operator[](std::size_t node) const { return values_[node]; }
  std::size_t size() const { return values_.size(); }

  const ScalarSource* source() const { return source_.get(); }
  bool has_source() const { return source_ != nullptr; }
  ScalarField without_source() const { return ScalarField(grid_, values_); }

  /// Analytic value when a source is attached, multilinear interpolation otherwise.
  double value_at(const Point& p) const;

  double min() const;
  double max() const;
  double max_abs() const;

 private:
  CylinderGrid grid_;
  std::vector<double> values_;
  std::shared_ptr<const ScalarSource> source_;
};

class CovectorField {
 public:
  CovectorField(CylinderGrid grid, std::vector<Covector> values);

  const CylinderGrid& grid() const { return grid_; }
  const Covector& operator[](std::size_t node) const { return values_[node]; }
  std::size_t size() const { return values_.size(); }

 private:
  CylinderGrid grid_;
  std::vector<Covector> values_;
};

/// Analytic gradient when the field carries a source with a gradient;
/// otherwise second-order central differences (periodic in angle,
/// one-sided at t = 0 and t = 1).
CovectorField gradient(const ScalarField& field);

/// g^{ij} a_i b_j at every node.
ScalarField oneform_inner(const CovectorField& a, const CovectorField& b, const MetricField& g);

/// Sum over nodes of f sqrt|g| times the trapezoid/rectangle weight.
double integrate_volume(const ScalarField& f, const MetricField& g);

/// Conservative flux stencil for sum_i d_i(A^{ij} d_j f) at one interior node.
double divergence_form_at(const MatrixField& weight, const std::vector<double>& f,
                          std::size_t node);

/// divergence_form_at on every interior node; boundary layers are set to 0.
ScalarField divergence_form_apply(const MatrixField& weight, const ScalarField& f);

/// Delta_g f = |g|^{-1/2} d_i(sqrt|g| g^{ij} d_j f) at interior nodes (0 on
/// boundary layers).
ScalarField laplace_beltrami_pointwise(const MetricField& g, const ScalarField& f);

/// Delta_g f at a point from analytic derivatives of g and f.
double laplace_beltrami_exact(const MetricSource& g, const ScalarSource& f, const Point& p);

}  // namespace calderon
