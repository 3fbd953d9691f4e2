#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "calderon/calculus.hpp"
#include "calderon/conformal.hpp"
#include "calderon/miller.hpp"

namespace calderon {

/// Finite-difference weights for the derivatives of order 0..max_order at
/// x0 from samples at `points` (Fornberg's recursion).
std::vector<std::vector<double>> fd_weights(double x0, const std::vector<double>& points, int max_order);

struct CauchyDefect {
  int order;
  double defect;  // max over Gamma_1 of |d^k u / dt^k|
};

/// One-sided second-order t-derivatives of u on the t = 1 layer for k = 0..k_max.
std::vector<CauchyDefect> cauchy_data_check(const ScalarField& u, int k_max);

struct SynthMode {
  int kx = 1;
  int ky = 0;
  double phase = 0.0;
  double weight = 1.0;
};

struct SynthParams {
  int nt = 17;
  std::vector<int> n_angular{16, 16};
  double T = 0.8;
  double rho = 1.0 / 6.0;
  double alpha = 0.5;
  double amplitude = 1.0;
  std::vector<SynthMode> modes{SynthMode{}};
  /// Relative to the mean diagonal of the normal equations.
  double ridge = 1e-6;
  int iterations = 500;
};

struct SynthResult {
  MillerDataset data;
  /// Quadrature L2 norm of the residual with zero coefficients.
  double baseline_residual;
  double residual;
  double residual_max;
  /// max |direct stencil residual - linearized residual| relative to the baseline max.
  double linearization_defect;
  double coefficient_bound;
  int iterations;
};

/// u = amplitude * eta(t) * sum_m w_m sin(kx x + ky y + phase), eta = exp(-1/(T-t));
/// a1, a2, a3 fitted by box-constrained ridge least squares (FISTA), A1 = A3 = 0.
SynthResult synth_approx_miller(const SynthParams& params);

struct GapStudyParams {
  int n = 3;
  std::vector<double> eps{0.05, 0.1, 0.2};
  /// Dyadic coarsening factors of the dataset grid, coarsest first.
  std::vector<int> factors{4, 2, 1};
  int mode_cut = 2;
  /// Angular node count in the extra directions x_3..x_{n-1} when n > 3.
  int extra_angular = 4;
};

struct GapStudyRow {
  double eps;
  int factor;
  std::string grid;
  double h;
  double gap_lowmode;
  double gap_frobenius;
  double harmonic_residual;      // quadrature L2 norm of the Miller residual
  double harmonic_residual_max;
  double weak_residual;          // normalized weak-condition residual of c_eps
  double boundary_defect;        // max over Gamma_1 of |c_eps - 1|
};

struct Regression {
  double coef_eps_r;
  double coef_eps2;
  double r_squared;
  std::size_t samples;
};

/// Least squares y ~ b1 x1 + b2 x2 (no intercept); R^2 about the mean of y.
Regression regress_two(const std::vector<double>& x1, const std::vector<double>& x2,
                       const std::vector<double>& y);

struct GapStudy {
  std::vector<GapStudyRow> rows;
  Regression regression;
};

/// gap between Lambda_{c_eps^4 g, Gamma_1} and Lambda_{g, Gamma_1} over (eps, level) cells.
/// The regression is NaN when there are fewer than two cells.
GapStudy dn_gap_study(const MillerDataset& data, const GapStudyParams& params);

struct NonIsometryReport {
  std::vector<double> coefficients;
  double p2;
  double u2_integral;
  double expected_p2;  // 15 * u2_integral
  double relative_difference;
  bool obstruction;
};

/// Volume polynomial of c_eps = 1 + eps u on the 3-D counterexample metric.
/// An empty eps list uses the seven Chebyshev nodes of [-0.5 / max|u|, 0.5 / max|u|].
NonIsometryReport nonisometry_check(const MillerDataset& data, std::vector<double> eps = {});

nlohmann::json to_json(const GapStudy& study);

}  // namespace calderon
