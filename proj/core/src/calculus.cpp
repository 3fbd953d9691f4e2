#include "calderon/calculus.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/LU>

#include "calderon/error.hpp"
#include "calderon/parallel.hpp"

namespace calderon {

ScalarField::ScalarField(CylinderGrid grid, std::vector<double> values,
                         std::shared_ptr<const ScalarSource> source)
    : grid_(std::move(grid)), values_(std::move(values)), source_(std::move(source)) {
  if (values_.size() != grid_.size()) {
    throw Error(ErrorCode::kShapeMismatch, "scalar field size does not match grid");
  }
  for (std::size_t node = 0; node < values_.size(); ++node) {
    if (!std::isfinite(values_[node])) {
      throw Error(ErrorCode::kInvalidArgument, "scalar field value is not finite", node);
    }
  }
}

ScalarField ScalarField::sample(const ScalarSource& source, const CylinderGrid& grid) {
  if (source.dim != grid.dim()) {
    throw Error(ErrorCode::kShapeMismatch, "scalar source dimension does not match grid");
  }
  std::vector<double> values(grid.size());
  parallel_for(grid.size(), [&](std::size_t node) { values[node] = source.value(grid.point(node)); });
  return ScalarField(grid, std::move(values), std::make_shared<const ScalarSource>(source));
}

ScalarField ScalarField::constant(const CylinderGrid& grid, double value) {
  return sample(constant_scalar(grid.dim(), value), grid);
}

double ScalarField::value_at(const Point& p) const {
  if (source_) return source_->value(p);
  double v = 0.0;
  for (const auto& [node, w] : grid_.interpolation_stencil(p)) v += w * values_[node];
  return v;
}

double ScalarField::min() const { return *std::min_element(values_.begin(), values_.end()); }
double ScalarField::max() const { return *std::max_element(values_.begin(), values_.end()); }

double ScalarField::max_abs() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

CovectorField::CovectorField(CylinderGrid grid, std::vector<Covector> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  if (values_.size() != grid_.size()) {
    throw Error(ErrorCode::kShapeMismatch, "covector field size does not match grid");
  }
}

CovectorField gradient(const ScalarField& field) {
  const CylinderGrid& grid = field.grid();
  const int n = grid.dim();
  std::vector<Covector> out(grid.size(), Covector::Zero(n));
  const ScalarSource* source = field.source();
  if (source && source->has_gradient()) {
    parallel_for(grid.size(), [&](std::size_t node) { out[node] = source->gradient(grid.point(node)); });
    return CovectorField(grid, std::move(out));
  }
  const auto& f = field.values();
  parallel_for(grid.size(), [&](std::size_t node) {
    const int it = grid.t_index(node);
    const double ht = grid.spacing(0);
    const std::size_t st = grid.stride(0);
    if (it == 0) {
      out[node][0] = (-3.0 * f[node] + 4.0 * f[node + st] - f[node + 2 * st]) / (2.0 * ht);
    } else if (it == grid.nt() - 1) {
      out[node][0] = (3.0 * f[node] - 4.0 * f[node - st] + f[node - 2 * st]) / (2.0 * ht);
    } else {
      out[node][0] = (f[node + st] - f[node - st]) / (2.0 * ht);
    }
    for (int axis = 1; axis < n; ++axis) {
      const std::size_t up = *grid.neighbor(node, axis, 1);
      const std::size_t down = *grid.neighbor(node, axis, -1);
      out[node][axis] = (f[up] - f[down]) / (2.0 * grid.spacing(axis));
    }
  });
  return CovectorField(grid, std::move(out));
}

ScalarField oneform_inner(const CovectorField& a, const CovectorField& b, const MetricField& g) {
  if (!(a.grid() == g.grid()) || !(b.grid() == g.grid())) {
    throw Error(ErrorCode::kShapeMismatch, "oneform_inner grids differ");
  }
  std::vector<double> values(g.grid().size());
  parallel_for(values.size(), [&](std::size_t node) {
    // Symmetrized contraction so that swapping a and b is bit-exact.
    const SymMatrix& inv = g.inverse(node);
    const Covector& x = a[node];
    const Covector& y = b[node];
    double s = 0.0;
    const int n = g.dim();
    for (int i = 0; i < n; ++i) {
      s += inv(i, i) * (x[i] * y[i]);
      for (int j = i + 1; j < n; ++j) s += inv(i, j) * (x[i] * y[j] + x[j] * y[i]);
    }
    values[node] = s;
  });
  return ScalarField(g.grid(), std::move(values));
}

double integrate_volume(const ScalarField& f, const MetricField& g) {
  if (!(f.grid() == g.grid())) throw Error(ErrorCode::kShapeMismatch, "integrate_volume grids differ");
  const CylinderGrid& grid = g.grid();
  double total = 0.0;
  for (std::size_t node = 0; node < grid.size(); ++node) {
    total += f[node] * g.sqrt_det(node) * grid.quadrature_weight(node);
  }
  return total;
}

namespace {

double centered(const CylinderGrid& grid, const std::vector<double>& f, std::size_t node, int axis) {
  const auto up = grid.neighbor(node, axis, 1);
  const auto down = grid.neighbor(node, axis, -1);
  return (f[*up] - f[*down]) / (2.0 * grid.spacing(axis));
}

}  // namespace

double divergence_form_at(const MatrixField& weight, const std::vector<double>& f,
                          std::size_t node) {
  const CylinderGrid& grid = weight.grid();
  const int t = grid.t_index(node);
  if (t == 0 || t == grid.nt() - 1) {
    throw Error(ErrorCode::kBoundaryLayerRequested, "divergence stencil needs an interior node",
                node);
  }
  const int n = grid.dim();
  double total = 0.0;
  for (int i = 0; i < n; ++i) {
    const double hi = grid.spacing(i);
    const std::size_t up = *grid.neighbor(node, i, 1);
    const std::size_t down = *grid.neighbor(node, i, -1);
    // Half-node fluxes between node and its neighbors along axis i.
    double flux_up = 0.5 * (weight[node](i, i) + weight[up](i, i)) * (f[up] - f[node]) / hi;
    double flux_down = 0.5 * (weight[node](i, i) + weight[down](i, i)) * (f[node] - f[down]) / hi;
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      const double dj = centered(grid, f, node, j);
      flux_up += 0.5 * (weight[node](i, j) + weight[up](i, j)) * 0.5 * (dj + centered(grid, f, up, j));
      flux_down +=
          0.5 * (weight[node](i, j) + weight[down](i, j)) * 0.5 * (dj + centered(grid, f, down, j));
    }
    total += (flux_up - flux_down) / hi;
  }
  return total;
}

ScalarField divergence_form_apply(const MatrixField& weight, const ScalarField& f) {
  if (!(weight.grid() == f.grid())) {
    throw Error(ErrorCode::kShapeMismatch, "divergence_form_apply grids differ");
  }
  const CylinderGrid& grid = f.grid();
  std::vector<double> out(grid.size(), 0.0);
  const std::size_t layer = grid.layer_size();
  parallel_for(grid.size() - 2 * layer, [&](std::size_t k) {
    const std::size_t node = layer + k;
    out[node] = divergence_form_at(weight, f.values(), node);
  });
  return ScalarField(grid, std::move(out));
}

ScalarField laplace_beltrami_pointwise(const MetricField& g, const ScalarField& f) {
  ScalarField div = divergence_form_apply(weight_field(g), f);
  auto values = div.values();
  for (std::size_t node = 0; node < values.size(); ++node) values[node] /= g.sqrt_det(node);
  return ScalarField(g.grid(), std::move(values));
}

double laplace_beltrami_exact(const MetricSource& g, const ScalarSource& f, const Point& p) {
  if (!g.has_derivative()) {
    throw Error(ErrorCode::kMissingAnalyticGradient, "metric source has no derivative");
  }
  if (!f.has_gradient() || !f.has_hessian()) {
    throw Error(ErrorCode::kMissingAnalyticGradient, "scalar source lacks gradient or Hessian");
  }
  const int n = g.dim;
  const SymMatrix gm = g.value(p);
  const SymMatrix inv = gm.inverse();
  const Covector grad = f.gradient(p);
  const Covector raised = inv * grad;
  // d_i(sqrt|g| g^{ij}) = sqrt|g| (tr(g^{-1} d_i g)/2 g^{ij} - (g^{-1} d_i g g^{-1})^{ij}).
  double value = (inv * f.hessian(p)).trace();
  for (int i = 0; i < n; ++i) {
    const SymMatrix dg = g.derivative(p, i);
    const SymMatrix a = inv * dg;
    value += 0.5 * a.trace() * raised[i] - (a * raised)[i];
  }
  return value;
}

}  // namespace calderon
