#include "calderon/counterexample.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/QR>

#include "calderon/error.hpp"

namespace calderon {

std::vector<std::vector<double>> fd_weights(double x0, const std::vector<double>& points, int max_order) {
  const int n = static_cast<int>(points.size());
  std::vector<std::vector<double>> c(max_order + 1, std::vector<double>(n, 0.0));
  double c1 = 1.0;
  double c4 = points[0] - x0;
  c[0][0] = 1.0;
  for (int i = 1; i < n; ++i) {
    const int mn = std::min(i, max_order);
    double c2 = 1.0;
    const double c5 = c4;
    c4 = points[i] - x0;
    for (int j = 0; j < i; ++j) {
      const double c3 = points[i] - points[j];
      c2 *= c3;
      if (j == i - 1) {
        for (int k = mn; k >= 1; --k) c[k][i] = c1 * (k * c[k - 1][i - 1] - c5 * c[k][i - 1]) / c2;
        c[0][i] = -c1 * c5 * c[0][i - 1] / c2;
      }
      for (int k = mn; k >= 1; --k) c[k][j] = (c4 * c[k][j] - k * c[k - 1][j]) / c3;
      c[0][j] = c4 * c[0][j] / c3;
    }
    c1 = c2;
  }
  return c;
}

std::vector<CauchyDefect> cauchy_data_check(const ScalarField& u, int k_max) {
  const CylinderGrid& grid = u.grid();
  if (k_max < 0) throw Error(ErrorCode::kInvalidArgument, "k_max must be non-negative");
  if (grid.nt() < k_max + 2) throw Error(ErrorCode::kInvalidArgument, "N_t must be at least k_max + 2");
  const double h = grid.spacing(0);
  const std::size_t layer = grid.layer_size();
  const std::size_t last = grid.size() - layer;
  std::vector<CauchyDefect> out;
  for (int k = 0; k <= k_max; ++k) {
    // k + 2 points give a second-order one-sided stencil for k >= 1.
    const int npts = k == 0 ? 1 : k + 2;
    std::vector<double> points(npts);
    for (int j = 0; j < npts; ++j) points[j] = 1.0 - j * h;
    const std::vector<double> w = fd_weights(1.0, points, k)[k];
    double worst = 0.0;
    for (std::size_t node = last; node < grid.size(); ++node) {
      double d = 0.0;
      for (int j = 0; j < npts; ++j) d += w[j] * u[node - j * layer];
      worst = std::max(worst, std::abs(d));
    }
    out.push_back({k, worst});
  }
  return out;
}

Regression regress_two(const std::vector<double>& x1, const std::vector<double>& x2,
                       const std::vector<double>& y) {
  const auto m = static_cast<Eigen::Index>(y.size());
  if (x1.size() != y.size() || x2.size() != y.size()) {
    throw Error(ErrorCode::kShapeMismatch, "regression columns differ in length");
  }
  if (m < 2) throw Error(ErrorCode::kInsufficientSamples, "regression needs at least two samples");
  Eigen::MatrixXd x(m, 2);
  Eigen::VectorXd b(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    x(i, 0) = x1[i];
    x(i, 1) = x2[i];
    b[i] = y[i];
  }
  const Eigen::Vector2d beta = x.colPivHouseholderQr().solve(b);
  const double ss_res = (x * beta - b).squaredNorm();
  const double mean = b.mean();
  const double ss_tot = (b.array() - mean).square().sum();
  const double r2 = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : (ss_res == 0.0 ? 1.0 : 0.0);
  return {beta[0], beta[1], r2, y.size()};
}

namespace {

CylinderGrid study_grid(const CylinderGrid& base, int n, int extra) {
  std::vector<int> angular = base.angular_extents();
  for (int k = 3; k < n; ++k) angular.push_back(extra);
  return CylinderGrid(base.nt(), angular);
}

}  // namespace

GapStudy dn_gap_study(const MillerDataset& data, const GapStudyParams& params) {
  data.check_shapes();
  if (params.n < 3) throw Error(ErrorCode::kDimensionTooSmall, "gap study needs n >= 3");
  for (double e : params.eps) {
    if (!(e >= 0.0)) throw Error(ErrorCode::kInvalidArgument, "eps values must be non-negative");
  }
  GapStudy study;
  for (int factor : params.factors) {
    const MillerDataset level = data.subsampled(factor);
    const CylinderGrid grid = study_grid(level.grid, params.n, params.extra_angular);
    const MetricField g = params.n == 3 ? assemble_counterexample_metric_3d(level, grid)
                                        : assemble_counterexample_metric_nd(level, grid);
    const DNMatrix base = dn_map_partial(assemble_stiffness(g), Boundary::kGamma1);
    const ResidualNorms r = residual_norms(miller_residual(level));
    const ScalarField u = lift_to_grid(level, level.u, grid);
    for (double eps : params.eps) {
      const ConformalFactor c = conformal_family(u, eps, params.n);
      const DNMatrix scaled = dn_map_partial(assemble_stiffness(scale_metric(g, c)), Boundary::kGamma1);
      const OperatorGap gap = operator_gap(scaled, base, params.mode_cut);
      const WeakConditionResidual weak = weak_condition_residual(g, c, Boundary::kGamma1);
      study.rows.push_back({eps, factor, grid.id(), grid.spacing(0), gap.lowmode_rel, gap.frobenius_rel,
                            r.l2, r.max, weak.residual, weak.boundary_defect});
    }
  }
  std::vector<double> x1;
  std::vector<double> x2;
  std::vector<double> y;
  for (const auto& row : study.rows) {
    x1.push_back(row.eps * row.harmonic_residual);
    x2.push_back(row.eps * row.eps);
    y.push_back(row.gap_lowmode);
  }
  if (y.size() >= 2) {
    study.regression = regress_two(x1, x2, y);
  } else {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    study.regression = {nan, nan, nan, y.size()};
  }
  return study;
}

NonIsometryReport nonisometry_check(const MillerDataset& data, std::vector<double> eps) {
  data.check_shapes();
  double u_max = 0.0;
  for (double v : data.u) u_max = std::max(u_max, std::abs(v));
  if (u_max == 0.0) throw Error(ErrorCode::kTrivialU, "u vanishes identically; no obstruction");
  if (eps.empty()) {
    // Chebyshev nodes on [-eps_max, eps_max]; c_eps >= 1/2 holds for either sign.
    constexpr double kPi = 3.14159265358979323846;
    for (int k = 0; k < 7; ++k) eps.push_back(0.5 / u_max * std::cos((2 * k + 1) * kPi / 14.0));
  }
  const MetricField g = assemble_counterexample_metric_3d(data, data.grid);
  const VolumeExpansion v = volume_expansion(g, ScalarField(data.grid, data.u), eps);
  NonIsometryReport out;
  out.coefficients = v.coefficients;
  out.p2 = v.coefficients[2];
  out.u2_integral = v.u2_integral;
  out.expected_p2 = 15.0 * v.u2_integral;
  out.relative_difference = std::abs(out.p2 - out.expected_p2) / std::abs(out.expected_p2);
  out.obstruction = out.p2 > 0.0 && out.relative_difference <= 1e-10;
  return out;
}

nlohmann::json to_json(const GapStudy& study) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : study.rows) {
    rows.push_back({{"eps", r.eps},
                    {"factor", r.factor},
                    {"grid", r.grid},
                    {"h", r.h},
                    {"gap_lowmode", r.gap_lowmode},
                    {"gap_frobenius", r.gap_frobenius},
                    {"harmonic_residual", r.harmonic_residual},
                    {"harmonic_residual_max", r.harmonic_residual_max},
                    {"weak_residual", r.weak_residual},
                    {"boundary_defect", r.boundary_defect}});
  }
  return {{"rows", rows},
          {"regression",
           {{"coef_eps_r", study.regression.coef_eps_r},
            {"coef_eps2", study.regression.coef_eps2},
            {"r_squared", study.regression.r_squared},
            {"samples", study.regression.samples}}}};
}

}  // namespace calderon
