#include <algorithm>
#include <cmath>

#include <Eigen/Sparse>

#include "calderon/counterexample.hpp"
#include "calderon/error.hpp"

namespace calderon {

namespace {

constexpr int kPowerIterations = 60;

double cutoff(double t, double T) { return t < T ? std::exp(-1.0 / (T - t)) : 0.0; }

double centered(const CylinderGrid& grid, const std::vector<double>& f, std::size_t node, int axis) {
  return (f[*grid.neighbor(node, axis, 1)] - f[*grid.neighbor(node, axis, -1)]) / (2.0 * grid.spacing(axis));
}

// Column of the (node, entry) unknown; entries 0, 1, 2 are a1, a2, a3.
struct UnknownMap {
  std::vector<int> column;  // per node, -1 when fixed to zero
  int count = 0;
};

int entry_of(int i, int j) { return i == 1 && j == 1 ? 0 : (i == 2 && j == 2 ? 2 : 1); }

}  // namespace

SynthResult synth_approx_miller(const SynthParams& params) {
  if (!(params.alpha > 0.0 && params.alpha < 1.0)) {
    throw Error(ErrorCode::kInfeasibleBounds, "alpha must lie in (0, 1) for a non-empty box");
  }
  if (!(params.T > 0.0 && params.T <= 1.0)) throw Error(ErrorCode::kInvalidArgument, "T must lie in (0, 1]");
  if (params.ridge < 0.0 || params.iterations < 0) throw Error(ErrorCode::kInvalidArgument, "bad solver settings");
  const CylinderGrid grid(params.nt, params.n_angular);
  if (grid.dim() != 3) throw Error(ErrorCode::kUnsupportedDimension, "synthesis builds 3-D datasets");
  MillerDataset data = MillerDataset::zeros(grid, params.T, params.rho, params.alpha);
  for (std::size_t node = 0; node < grid.size(); ++node) {
    const Point p = grid.point(node);
    double s = 0.0;
    for (const auto& m : params.modes) s += m.weight * std::sin(m.kx * p[1] + m.ky * p[2] + m.phase);
    data.u[node] = params.amplitude * cutoff(p[0], params.T) * s;
  }

  // Unknowns: a1, a2, a3 at interior nodes with t < T.
  UnknownMap unknowns;
  unknowns.column.assign(grid.size(), -1);
  for (std::size_t node : grid.interior_nodes()) {
    if (grid.point(node)[0] < params.T - 1e-14) {
      unknowns.column[node] = unknowns.count;
      unknowns.count += 3;
    }
  }
  const auto interior = grid.interior_nodes();
  const auto rows = static_cast<Eigen::Index>(interior.size());

  // Linearization r(a) = r0 + L a of the flux stencil in the spatial block of A.
  std::vector<Eigen::Triplet<double>> entries;
  const auto& f = data.u;
  auto add = [&](Eigen::Index row, std::size_t node, int i, int j, double value) {
    const int col = unknowns.column[node];
    if (col >= 0 && value != 0.0) entries.emplace_back(row, col + entry_of(i, j), value);
  };
  for (Eigen::Index row = 0; row < rows; ++row) {
    const std::size_t node = interior[row];
    for (int i = 1; i <= 2; ++i) {
      const double hi = grid.spacing(i);
      const std::size_t up = *grid.neighbor(node, i, 1);
      const std::size_t down = *grid.neighbor(node, i, -1);
      for (int j = 1; j <= 2; ++j) {
        double g_up;
        double g_down;
        if (j == i) {
          g_up = (f[up] - f[node]) / (hi * hi);
          g_down = -(f[node] - f[down]) / (hi * hi);
        } else {
          const double dj = centered(grid, f, node, j);
          g_up = 0.5 * (dj + centered(grid, f, up, j)) / hi;
          g_down = -0.5 * (dj + centered(grid, f, down, j)) / hi;
        }
        add(row, node, i, j, 0.5 * (g_up + g_down));
        add(row, up, i, j, 0.5 * g_up);
        add(row, down, i, j, 0.5 * g_down);
      }
    }
  }
  Eigen::SparseMatrix<double> lin(rows, unknowns.count);
  lin.setFromTriplets(entries.begin(), entries.end());

  const ScalarField r0_field = miller_residual(data);
  Eigen::VectorXd r0(rows);
  for (Eigen::Index row = 0; row < rows; ++row) r0[row] = r0_field[interior[row]];

  const double bound = 0.5 * (1.0 - params.alpha);
  Eigen::VectorXd x = Eigen::VectorXd::Zero(unknowns.count);
  int iterations = 0;
  if (unknowns.count > 0 && r0.norm() > 0.0) {
    double diag_mean = 0.0;
    for (int k = 0; k < lin.outerSize(); ++k) diag_mean += lin.col(k).squaredNorm();
    diag_mean /= unknowns.count;
    const double lambda = params.ridge * diag_mean;
    Eigen::VectorXd v = Eigen::VectorXd::Ones(unknowns.count).normalized();
    double sigma2 = 0.0;
    for (int k = 0; k < kPowerIterations; ++k) {
      const Eigen::VectorXd w = lin.transpose() * (lin * v);
      sigma2 = w.norm();
      if (sigma2 == 0.0) break;
      v = w / sigma2;
    }
    const double lipschitz = 1.01 * (sigma2 + lambda);
    Eigen::VectorXd y = x;
    double t = 1.0;
    for (; iterations < params.iterations; ++iterations) {
      const Eigen::VectorXd grad = lin.transpose() * (r0 + lin * y) + lambda * y;
      const Eigen::VectorXd next = (y - grad / lipschitz).cwiseMax(-bound).cwiseMin(bound);
      const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
      y = next + ((t - 1.0) / t_next) * (next - x);
      x = next;
      t = t_next;
    }
  }
  for (std::size_t node = 0; node < grid.size(); ++node) {
    const int col = unknowns.column[node];
    if (col < 0) continue;
    data.a1[node] = x[col];
    data.a2[node] = x[col + 1];
    data.a3[node] = x[col + 2];
  }

  const ScalarField direct = miller_residual(data);
  const Eigen::VectorXd linear = r0 + lin * x;
  double defect = 0.0;
  for (Eigen::Index row = 0; row < rows; ++row) {
    defect = std::max(defect, std::abs(direct[interior[row]] - linear[row]));
  }
  const ResidualNorms base = residual_norms(r0_field);
  const ResidualNorms fitted = residual_norms(direct);
  if (base.l2 > 0.0 && !(fitted.l2 < base.l2)) {
    throw Error(ErrorCode::kInfeasibleBounds, "box constraints admit no residual reduction");
  }
  return {std::move(data), base.l2, fitted.l2, fitted.max, base.max > 0.0 ? defect / base.max : defect,
          bound, iterations};
}

}  // namespace calderon
