#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include <Eigen/LU>

#include "calderon/analytic.hpp"
#include "calderon/grid.hpp"
#include "calderon/metric.hpp"
#include "calderon/types.hpp"

namespace oracle {

inline constexpr double kPi = 3.14159265358979323846;

/// mu coth(mu), the flat DN symbol on a unit-length cylinder with zero data at the far end.
inline double coth_symbol(double mu) { return mu == 0.0 ? 1.0 : mu / std::tanh(mu); }

/// Discrete flat-cylinder DN eigenvalue of the Q1 scheme, by separation of
/// variables: periodic mass and stiffness symbols in each angle, then the
/// Schur complement of the resulting 1-D tridiagonal t-problem at t = 1.
inline double q1_flat_mode_eigenvalue(int nt, const std::vector<int>& n_angular, const std::vector<int>& m,
                                      double kappa2 = 0.0) {
  double mass = 1.0, stiff = 0.0, area = 1.0;
  for (std::size_t k = 0; k < n_angular.size(); ++k) {
    const double h = 2.0 * kPi / n_angular[k];
    const double c = std::cos(m[k] * h);
    const double mk = h * (2.0 + c) / 3.0;
    const double kk = (2.0 - 2.0 * c) / h;
    stiff = stiff * mk + mass * kk;
    mass *= mk;
    area *= h;
  }
  const double ht = 1.0 / (nt - 1);
  const double b = stiff + kappa2 * mass;
  // T = mass * K_t + b * M_t on nodes 0..nt-1; node 0 is Dirichlet.
  const double diag = mass * 2.0 / ht + b * 4.0 * ht / 6.0;
  const double off = -mass / ht + b * ht / 6.0;
  const double end = mass / ht + b * 2.0 * ht / 6.0;
  // Forward elimination over interior nodes 1..nt-2.
  double pivot = 0.0;
  for (int i = 1; i <= nt - 2; ++i) pivot = diag - (i == 1 ? 0.0 : off * off / pivot);
  const double schur = nt > 2 ? end - off * off / pivot : end;
  return schur / area;
}

/// sqrt|g| g^{-1} of a 3x3 symmetric matrix through explicit cofactors.
inline calderon::SymMatrix weight_3x3(const calderon::SymMatrix& g) {
  const double a = g(0, 0), b = g(0, 1), c = g(0, 2), d = g(1, 1), e = g(1, 2), f = g(2, 2);
  const double c00 = d * f - e * e, c01 = c * e - b * f, c02 = b * e - c * d;
  const double c11 = a * f - c * c, c12 = b * c - a * e, c22 = a * d - b * b;
  const double det = a * c00 + b * c01 + c * c02;
  calderon::SymMatrix w(3, 3);
  w << c00, c01, c02, c01, c11, c12, c02, c12, c22;
  return w / std::sqrt(det);
}

/// Second-order central-difference Laplace-Beltrami from metric and function values only.
inline double laplace_beltrami_fd(const calderon::MetricSource& g, const std::function<double(const calderon::Point&)>& f,
                                  const calderon::Point& p, double h = 1e-3) {
  const int n = g.dim;
  auto flux = [&](const calderon::Point& q, int i) {
    const calderon::SymMatrix gq = g(q);
    const calderon::SymMatrix inv = gq.inverse();
    double out = 0.0;
    for (int j = 0; j < n; ++j) {
      calderon::Point qp = q, qm = q;
      qp[j] += h;
      qm[j] -= h;
      out += inv(i, j) * (f(qp) - f(qm)) / (2.0 * h);
    }
    return std::sqrt(gq.determinant()) * out;
  };
  double div = 0.0;
  for (int i = 0; i < n; ++i) {
    calderon::Point pp = p, pm = p;
    pp[i] += h;
    pm[i] -= h;
    div += (flux(pp, i) - flux(pm, i)) / (2.0 * h);
  }
  return div / std::sqrt(g(p).determinant());
}

/// Plain nested loop of sum w_node f(node) over a grid.
inline double quadrature(const calderon::CylinderGrid& grid, const std::function<double(std::size_t)>& f) {
  double sum = 0.0;
  for (std::size_t node = 0; node < grid.size(); ++node) sum += grid.quadrature_weight(node) * f(node);
  return sum;
}

/// Observed order between consecutive levels.
inline double order(double e0, double e1, double h0, double h1) { return std::log(e0 / e1) / std::log(h0 / h1); }

inline calderon::Point point(std::initializer_list<double> xs) {
  calderon::Point p(static_cast<int>(xs.size()));
  int i = 0;
  for (double x : xs) p[i++] = x;
  return p;
}

inline calderon::Point random_point(int dim, std::mt19937_64& rng, double t_lo = 0.0, double t_hi = 1.0) {
  std::uniform_real_distribution<double> t(t_lo, t_hi), x(0.0, 2.0 * kPi);
  calderon::Point p(dim);
  p[0] = t(rng);
  for (int i = 1; i < dim; ++i) p[i] = x(rng);
  return p;
}

}  // namespace oracle
