#include "calderon/conformal.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

#include <Eigen/LU>

#include "calderon/error.hpp"
#include "calderon/parallel.hpp"

namespace calderon {

ConformalFactor::ConformalFactor(ScalarField c, int dim) : c_(std::move(c)), dim_(dim) {
  if (dim_ != c_.grid().dim()) throw Error(ErrorCode::kShapeMismatch, "factor dimension mismatch");
  for (std::size_t node = 0; node < c_.size(); ++node) {
    if (!(c_[node] > 0.0)) {
      throw Error(ErrorCode::kNonPositiveFactor, "conformal factor must be positive", node);
    }
  }
}

ScalarSource ConformalFactor::power_source() const {
  if (!c_.has_source()) throw Error(ErrorCode::kMissingAnalyticGradient, "factor has no source");
  if (dim_ == 2) return constant_scalar(2, 1.0);
  return power(*c_.source(), dim_ - 2.0);
}

ScalarField ConformalFactor::power_field() const {
  if (c_.has_source()) return ScalarField::sample(power_source(), c_.grid());
  std::vector<double> values(c_.size());
  for (std::size_t node = 0; node < values.size(); ++node) values[node] = std::pow(c_[node], dim_ - 2.0);
  return ScalarField(c_.grid(), std::move(values));
}

namespace {

MetricField scale_by_power(const MetricField& g, const ConformalFactor& c, int exponent) {
  if (!(g.grid() == c.field().grid())) {
    throw Error(ErrorCode::kShapeMismatch, "factor grid does not match metric grid");
  }
  const CylinderGrid& grid = g.grid();
  std::vector<SymMatrix> samples(grid.size());
  for (std::size_t node = 0; node < grid.size(); ++node) {
    samples[node] = std::pow(c.field()[node], exponent) * g.metric(node);
  }
  const std::string id = g.id() + "*c^" + std::to_string(exponent);
  MetricField scaled = MetricField::from_samples(grid, std::move(samples), id);
  const ScalarSource* cs = c.field().source();
  const MetricSource* gs = g.source();
  if (!cs || !gs) return scaled;
  MetricSource source;
  source.dim = gs->dim;
  source.id = id;
  ScalarSource factor = *cs;
  MetricSource base = *gs;
  source.value = [=](const Point& p) {
    return SymMatrix(std::pow(factor.value(p), exponent) * base.value(p));
  };
  if (factor.has_gradient() && base.has_derivative()) {
    source.derivative = [=](const Point& p, int axis) {
      const double v = factor.value(p);
      const double dv = factor.gradient(p)[axis];
      return SymMatrix(exponent * std::pow(v, exponent - 1) * dv * base.value(p) +
                       std::pow(v, exponent) * base.derivative(p, axis));
    };
  }
  return scaled.with_source(std::make_shared<const MetricSource>(std::move(source)));
}

}  // namespace

MetricField scale_metric(const MetricField& g, const ConformalFactor& c) {
  if (g.dim() < 3) {
    throw Error(ErrorCode::kUnsupportedDimension, "c^4 scaling is for n >= 3; use scale_metric_2d");
  }
  return scale_by_power(g, c, 4);
}

MetricField scale_metric_2d(const MetricField& g, const ConformalFactor& c) {
  if (g.dim() != 2) throw Error(ErrorCode::kUnsupportedDimension, "first-power scaling needs n = 2");
  return scale_by_power(g, c, 1);
}

ConformalPotential conformal_potential(const MetricField& g, const ConformalFactor& c,
                                       const PotentialOptions& options) {
  const CylinderGrid& grid = g.grid();
  const int n = g.dim();
  if (n == 2) {
    return {ScalarField::sample(constant_scalar(2, 0.0), grid), false};
  }
  if (options.analytic) {
    const MetricSource* gs = g.source();
    if (!gs || !c.field().has_source()) {
      throw Error(ErrorCode::kMissingAnalyticGradient, "analytic potential needs metric and factor sources");
    }
    const MetricSource metric = *gs;
    const ScalarSource cp = c.power_source();
    ScalarSource q;
    q.dim = n;
    q.id = "q(" + metric.id + "," + c.field().source()->id + ")";
    q.value = [metric, cp](const Point& p) { return laplace_beltrami_exact(metric, cp, p) / cp.value(p); };
    return {ScalarField::sample(q, grid), false};
  }
  if (!options.extend_boundary) {
    throw Error(ErrorCode::kBoundaryLayerRequested,
                "stencil potential is undefined on the t = 0, 1 layers without extension");
  }
  const ScalarField cp = c.power_field().without_source();
  const ScalarField lap = laplace_beltrami_pointwise(g, cp);
  std::vector<double> q(grid.size());
  for (std::size_t node = 0; node < q.size(); ++node) q[node] = lap[node] / cp[node];
  const std::size_t layer = grid.layer_size();
  const std::size_t last = grid.size() - layer;
  for (std::size_t k = 0; k < layer; ++k) {
    q[k] = 2.0 * q[k + layer] - q[k + 2 * layer];
    q[last + k] = 2.0 * q[last + k - layer] - q[last + k - 2 * layer];
  }
  return {ScalarField(grid, std::move(q)), true};
}

double scaling_law_residual(const MetricField& g, const ConformalFactor& c, const ScalarField& f,
                            const PotentialOptions& options) {
  const CylinderGrid& grid = g.grid();
  const int n = g.dim();
  if (n < 3) throw Error(ErrorCode::kUnsupportedDimension, "scaling law is stated for n >= 3");
  const ScalarField fv = f.without_source();
  const ScalarField lhs = laplace_beltrami_pointwise(scale_metric(g, c), fv);
  const ScalarField cp = c.power_field();
  std::vector<double> product(grid.size());
  for (std::size_t node = 0; node < grid.size(); ++node) product[node] = cp[node] * fv[node];
  const ScalarField lap = laplace_beltrami_pointwise(g, ScalarField(grid, product));
  const ScalarField q = conformal_potential(g, c, options).q;
  double worst = 0.0;
  for (std::size_t node : grid.interior_nodes()) {
    const double cn = std::pow(c.field()[node], -(n + 2.0));
    const double rhs = cn * (-lap[node] + q[node] * product[node]);
    worst = std::max(worst, std::abs(-lhs[node] - rhs));
  }
  return worst;
}

double algebraic_identity_check(const MetricSource& g, const ScalarSource& c, const ScalarSource& u,
                                const ScalarSource& w, const CylinderGrid& grid) {
  if (!c.has_gradient() || !u.has_gradient() || !w.has_gradient()) {
    throw Error(ErrorCode::kMissingAnalyticGradient, "identity check needs analytic gradients");
  }
  const int n = grid.dim();
  if (g.dim != n || c.dim != n || u.dim != n || w.dim != n) {
    throw Error(ErrorCode::kShapeMismatch, "identity inputs differ in dimension");
  }
  const double k = n - 2.0;
  std::vector<double> error(grid.size());
  parallel_for(grid.size(), [&](std::size_t node) {
    const Point p = grid.point(node);
    const SymMatrix gm = g.value(p);
    const double cv = c.value(p);
    const Covector dc = c.gradient(p);
    const double uv = u.value(p);
    const double wv = w.value(p);
    const Covector du = u.gradient(p);
    const Covector dw = w.gradient(p);

    const SymMatrix scaled = std::pow(cv, 4) * gm;
    const double lhs = du.dot(scaled.inverse() * dw) * std::sqrt(scaled.determinant());

    // Product-rule gradients of c^k, c^k u, c^k w and c^k u w.
    const double ck = std::pow(cv, k);
    const Covector dck = k * std::pow(cv, k - 1.0) * dc;
    const Covector dcku = dck * uv + ck * du;
    const Covector dckw = dck * wv + ck * dw;
    const Covector dckuw = dck * (uv * wv) + ck * (du * wv + uv * dw);
    const SymMatrix inv = gm.inverse();
    const double rhs = (dcku.dot(inv * dckw) - dck.dot(inv * dckuw)) * std::sqrt(gm.determinant());
    error[node] = std::abs(lhs - rhs);
  });
  return *std::max_element(error.begin(), error.end());
}

WeakConditionResidual weak_condition_residual(const MetricField& g, const ConformalFactor& c,
                                              Boundary gamma) {
  const CylinderGrid& grid = g.grid();
  const StiffnessSystem system = assemble_stiffness(g);
  const ScalarField cp = c.power_field();
  const Eigen::VectorXd v = Eigen::Map<const Eigen::VectorXd>(cp.values().data(), cp.size());
  const Eigen::VectorXd r = system.matrix * v;
  const double scale = system.matrix.norm() * v.norm();
  WeakConditionResidual out{0.0, 0.0, 0.0, 0.0, 0.0};
  for (std::size_t node : grid.interior_nodes()) out.interior_max = std::max(out.interior_max, std::abs(r[node]));
  for (std::size_t node : grid.boundary_nodes(gamma)) {
    out.gamma_max = std::max(out.gamma_max, std::abs(r[node]));
    out.boundary_defect = std::max(out.boundary_defect, std::abs(c.field()[node] - 1.0));
  }
  out.neumann_defect = out.gamma_max / grid.boundary_weight();
  out.residual = scale > 0.0 ? std::max(out.interior_max, out.gamma_max) / scale : 0.0;
  return out;
}

ConformalFactor conformal_family(const ScalarField& u, double eps, int n) {
  if (!(eps >= 0.0)) throw Error(ErrorCode::kInvalidArgument, "eps must be non-negative");
  if (n < 3) throw Error(ErrorCode::kUnsupportedDimension, "conformal family is defined for n >= 3");
  if (u.grid().dim() != n) throw Error(ErrorCode::kShapeMismatch, "u lives on a grid of another dimension");
  std::vector<double> base(u.size());
  for (std::size_t node = 0; node < u.size(); ++node) base[node] = 1.0 + eps * u[node];
  const double floor = *std::min_element(base.begin(), base.end());
  if (n == 3 && floor < 0.5) {
    throw Error(ErrorCode::kFactorTooLarge, "1 + eps u drops below 1/2");
  }
  if (n > 3 && !(floor > 0.0)) {
    throw Error(ErrorCode::kFactorTooLarge, "1 + eps u is not positive");
  }
  const double exponent = 1.0 / (n - 2.0);
  if (u.has_source()) {
    ScalarSource c = affine(1.0, eps, *u.source());
    if (n > 3) c = power(c, exponent);
    c.id = "c_eps(" + std::to_string(eps) + ")";
    return ConformalFactor(ScalarField::sample(c, u.grid()), n);
  }
  if (n > 3) {
    for (double& b : base) b = std::pow(b, exponent);
  }
  return ConformalFactor(ScalarField(u.grid(), std::move(base)), n);
}

VolumeExpansion volume_expansion(const MetricField& g, const ScalarField& u,
                                 const std::vector<double>& eps_list) {
  if (g.dim() != 3) throw Error(ErrorCode::kUnsupportedDimension, "volume expansion is for n = 3");
  std::vector<double> eps;
  for (double e : eps_list) {
    if (std::find(eps.begin(), eps.end(), e) == eps.end()) eps.push_back(e);
    if (eps.size() == 7) break;
  }
  if (eps.size() < 7) {
    throw Error(ErrorCode::kInsufficientSamples, "volume expansion needs 7 distinct eps values");
  }
  const CylinderGrid& grid = g.grid();
  const ScalarField one(grid, std::vector<double>(grid.size(), 1.0));
  const double base_volume = integrate_volume(one, g);
  const ScalarField plain = u.without_source();
  VolumeExpansion out;
  out.eps = eps;
  out.volumes.resize(7);
  parallel_for(7, [&](std::size_t k) {
    std::vector<double> c(grid.size());
    for (std::size_t node = 0; node < c.size(); ++node) c[node] = 1.0 + eps[k] * plain[node];
    const MetricField scaled = scale_metric(g.without_source(), ConformalFactor(ScalarField(grid, c), 3));
    out.volumes[k] = integrate_volume(one, scaled) - base_volume;
  });
  // Vandermonde solve in the rescaled variable s = eps / max|eps|.
  double span = 0.0;
  for (double e : eps) span = std::max(span, std::abs(e));
  Eigen::MatrixXd vandermonde(7, 7);
  Eigen::VectorXd rhs(7);
  for (int i = 0; i < 7; ++i) {
    const double s = eps[i] / span;
    double power_s = 1.0;
    for (int j = 0; j < 7; ++j) {
      vandermonde(i, j) = power_s;
      power_s *= s;
    }
    rhs[i] = out.volumes[i];
  }
  const Eigen::VectorXd q = vandermonde.fullPivLu().solve(rhs);
  out.coefficients.resize(7);
  for (int j = 0; j < 7; ++j) out.coefficients[j] = q[j] / std::pow(span, j);
  std::vector<double> u2(grid.size());
  for (std::size_t node = 0; node < u2.size(); ++node) u2[node] = plain[node] * plain[node];
  out.u2_integral = integrate_volume(ScalarField(grid, std::move(u2)), g);
  return out;
}

double global_rigidity_check(const MetricField& g) {
  const CylinderGrid& grid = g.grid();
  const StiffnessSystem system = assemble_stiffness(g);
  const BoundaryTrace one(grid, Boundary::kFull,
                          std::vector<double>(grid.boundary_nodes(Boundary::kFull).size(), 1.0));
  const DirichletSolution v = solve_dirichlet(system, one);
  double worst = 0.0;
  for (double x : v.field.values()) worst = std::max(worst, std::abs(x - 1.0));
  return worst;
}

}  // namespace calderon
