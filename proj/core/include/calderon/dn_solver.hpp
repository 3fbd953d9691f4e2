#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "calderon/calculus.hpp"
#include "calderon/grid.hpp"
#include "calderon/metric.hpp"

namespace calderon {

/// Q1 Galerkin matrix of the form int <du, dv>_g dVol_g (+ int V u v dVol_g).
struct StiffnessSystem {
  CylinderGrid grid;
  Eigen::SparseMatrix<double> matrix;
  bool has_potential = false;
  std::string metric_id;
  std::string potential_id = "none";

  std::vector<std::size_t> interior() const { return grid.interior_nodes(); }
};

/// Tensor 2-point Gauss quadrature per cell. The metric (and V) are
/// evaluated analytically when a source is attached, otherwise by
/// multilinear interpolation of the node samples.
StiffnessSystem assemble_stiffness(const MetricField& g,
                                   const std::optional<ScalarField>& potential = std::nullopt);

/// Dirichlet data on the boundary layers, zero outside the declared support.
class BoundaryTrace {
 public:
  /// `values` has one entry per node of boundary_nodes(kFull) (Gamma_0 layer first).
  BoundaryTrace(CylinderGrid grid, Boundary support, std::vector<double> values);

  static BoundaryTrace from_function(const CylinderGrid& grid, Boundary support,
                                     const std::function<double(const Point&)>& f);

  const CylinderGrid& grid() const { return grid_; }
  Boundary support() const { return support_; }
  const std::vector<double>& values() const { return values_; }

 private:
  CylinderGrid grid_;
  Boundary support_;
  std::vector<double> values_;
};

struct DirichletSolution {
  ScalarField field;
  /// ||K_II u_I + K_IB u_B|| / ||K_IB u_B||.
  double relative_residual;
  /// min(bc) - 1e-8 <= u <= max(bc) + 1e-8; reported, not enforced.
  bool max_principle_holds;
};

DirichletSolution solve_dirichlet(const StiffnessSystem& system, const BoundaryTrace& bc);

/// Dense partial DN matrix on the nodes of Gamma.
struct DNMatrix {
  Eigen::MatrixXd values;
  Boundary gamma;
  CylinderGrid grid;
  std::vector<std::size_t> nodes;
  std::string metric_id;
  std::string potential_id;
};

/// Schur complement K_GG - K_GR K_RR^{-1} K_RG with R the interior nodes
/// (Dirichlet zero on the rest of the boundary).
DNMatrix dn_map_partial(const StiffnessSystem& system, Boundary gamma);

DNMatrix dn_map_schrodinger(const MetricField& g, const ScalarField& potential, Boundary gamma);

/// Real Fourier modes on T^{n-1}, orthonormal in L^2 on a boundary layer.
struct FourierMode {
  std::vector<int> wavenumber;
  bool sine = false;
};

/// Constant mode first, then cos/sin pairs for every canonical m with 0 < |m| <= cut.
std::vector<FourierMode> lowmode_basis(int dim, int cut);

/// Nodal samples of the modes on Gamma (block diagonal over both layers for the full boundary).
Eigen::MatrixXd lowmode_samples(const DNMatrix& dn, const std::vector<FourierMode>& modes);

/// Phi^T Lambda Phi; comparable across grids.
Eigen::MatrixXd lowmode_matrix(const DNMatrix& dn, int cut);

/// psi^T Lambda psi / sum(w psi^2) for one mode on the Gamma_0 or Gamma_1 layer.
double mode_eigenvalue(const DNMatrix& dn, const FourierMode& mode);

struct OperatorGap {
  double frobenius_rel;
  double lowmode_rel;
};

/// ||L1 - L2|| / max(||L1||, ||L2||) in Frobenius norm, on all nodes and
/// on the low-mode projection.
OperatorGap operator_gap(const DNMatrix& a, const DNMatrix& b, int mode_cut);

/// Low-mode relative gap; the two matrices may live on different grids.
double lowmode_gap(const DNMatrix& a, const DNMatrix& b, int mode_cut);

/// CSV (row-major, 17 significant digits) plus `<path>.json` metadata.
void write_dn_matrix(const DNMatrix& dn, const std::filesystem::path& csv_path);
Eigen::MatrixXd read_dn_csv(const std::filesystem::path& csv_path);

}  // namespace calderon
