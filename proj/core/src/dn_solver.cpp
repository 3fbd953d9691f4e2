#include "calderon/dn_solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>

#include <Eigen/LU>
#include <nlohmann/json.hpp>

#include "calderon/error.hpp"
#include "calderon/parallel.hpp"
#include "interior_solver.hpp"

namespace calderon {

namespace {

constexpr std::size_t kSchurChunk = 64;
constexpr double kBackwardErrorLimit = 1e-10;

struct ReferenceElement {
  int dim;
  int corners;
  int points;
  double point_weight;
  std::vector<std::array<double, kMaxDim>> xi;
  std::vector<double> phi;                       // [q * corners + c]
  std::vector<Covector> dphi;                    // [q * corners + c]
};

ReferenceElement make_reference(const CylinderGrid& grid) {
  ReferenceElement ref;
  ref.dim = grid.dim();
  ref.corners = 1 << ref.dim;
  ref.points = ref.corners;
  double volume = 1.0;
  for (int a = 0; a < ref.dim; ++a) volume *= grid.spacing(a);
  ref.point_weight = volume / ref.points;
  const double offset = 0.5 / std::sqrt(3.0);
  const double gauss[2] = {0.5 - offset, 0.5 + offset};
  for (int q = 0; q < ref.points; ++q) {
    std::array<double, kMaxDim> xi{};
    for (int a = 0; a < ref.dim; ++a) xi[a] = gauss[(q >> a) & 1];
    ref.xi.push_back(xi);
    for (int c = 0; c < ref.corners; ++c) {
      double value = 1.0;
      Covector grad = Covector::Ones(ref.dim);
      for (int a = 0; a < ref.dim; ++a) {
        const bool upper = (c >> a) & 1;
        const double factor = upper ? xi[a] : 1.0 - xi[a];
        value *= factor;
        for (int b = 0; b < ref.dim; ++b) {
          grad[b] *= (b == a) ? (upper ? 1.0 : -1.0) / grid.spacing(a) : factor;
        }
      }
      ref.phi.push_back(value);
      ref.dphi.push_back(grad);
    }
  }
  return ref;
}

std::size_t cell_count(const CylinderGrid& grid) {
  std::size_t count = static_cast<std::size_t>(grid.nt() - 1);
  for (int n : grid.angular_extents()) count *= static_cast<std::size_t>(n);
  return count;
}

MultiIndex cell_base(const CylinderGrid& grid, std::size_t cell) {
  MultiIndex base{};
  for (int a = grid.dim() - 1; a >= 1; --a) {
    const auto extent = static_cast<std::size_t>(grid.extent(a));
    base[a] = static_cast<int>(cell % extent);
    cell /= extent;
  }
  base[0] = static_cast<int>(cell);
  return base;
}

double frobenius_rel(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  const double scale = std::max(a.norm(), b.norm());
  if (scale == 0.0) return 0.0;
  return (a - b).norm() / scale;
}

}  // namespace

StiffnessSystem assemble_stiffness(const MetricField& g, const std::optional<ScalarField>& potential) {
  const CylinderGrid& grid = g.grid();
  if (potential && !(potential->grid() == grid)) {
    throw Error(ErrorCode::kShapeMismatch, "potential grid does not match metric grid");
  }
  const ReferenceElement ref = make_reference(grid);
  const int nc = ref.corners;
  const std::size_t cells = cell_count(grid);
  std::vector<double> element(cells * nc * nc, 0.0);
  std::vector<std::size_t> corner_nodes(cells * nc);

  parallel_for(cells, [&](std::size_t cell) {
    const MultiIndex base = cell_base(grid, cell);
    for (int c = 0; c < nc; ++c) {
      MultiIndex m = base;
      for (int a = 0; a < ref.dim; ++a) m[a] += (c >> a) & 1;
      corner_nodes[cell * nc + c] = grid.index(m);
    }
    double* ke = &element[cell * nc * nc];
    Point p(ref.dim);
    for (int q = 0; q < ref.points; ++q) {
      for (int a = 0; a < ref.dim; ++a) p[a] = (base[a] + ref.xi[q][a]) * grid.spacing(a);
      const SymMatrix metric = g.evaluate(p);
      const double sqrt_det = std::sqrt(metric.determinant());
      SymMatrix w = sqrt_det * metric.inverse();
      w = 0.5 * (w + w.transpose()).eval();
      const double mass = potential ? potential->value_at(p) * sqrt_det : 0.0;
      for (int c = 0; c < nc; ++c) {
        const Covector wc = w * ref.dphi[q * nc + c];
        for (int d = c; d < nc; ++d) {
          double v = wc.dot(ref.dphi[q * nc + d]);
          if (potential) v += mass * ref.phi[q * nc + c] * ref.phi[q * nc + d];
          ke[c * nc + d] += ref.point_weight * v;
        }
      }
    }
    for (int c = 0; c < nc; ++c) {
      for (int d = 0; d < c; ++d) ke[c * nc + d] = ke[d * nc + c];
    }
  });

  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(cells * nc * nc);
  for (std::size_t cell = 0; cell < cells; ++cell) {
    for (int c = 0; c < nc; ++c) {
      for (int d = 0; d < nc; ++d) {
        triplets.emplace_back(static_cast<int>(corner_nodes[cell * nc + c]),
                              static_cast<int>(corner_nodes[cell * nc + d]),
                              element[(cell * nc + c) * nc + d]);
      }
    }
  }
  StiffnessSystem system{grid, Eigen::SparseMatrix<double>(grid.size(), grid.size()),
                         potential.has_value(), g.id(), "none"};
  system.matrix.setFromTriplets(triplets.begin(), triplets.end());
  if (potential) {
    system.potential_id = potential->has_source() ? potential->source()->id : "samples";
  }
  return system;
}

BoundaryTrace::BoundaryTrace(CylinderGrid grid, Boundary support, std::vector<double> values)
    : grid_(std::move(grid)), support_(support), values_(std::move(values)) {
  const std::size_t layer = grid_.layer_size();
  if (values_.size() != 2 * layer) {
    throw Error(ErrorCode::kShapeMismatch, "boundary trace needs one value per boundary node");
  }
  for (std::size_t k = 0; k < values_.size(); ++k) {
    const bool on_gamma0 = k < layer;
    const bool supported = support_ == Boundary::kFull ||
                           (support_ == Boundary::kGamma0 && on_gamma0) ||
                           (support_ == Boundary::kGamma1 && !on_gamma0);
    if (!supported && values_[k] != 0.0) {
      throw Error(ErrorCode::kInvalidArgument, "boundary trace is nonzero outside its support", k);
    }
  }
}

BoundaryTrace BoundaryTrace::from_function(const CylinderGrid& grid, Boundary support,
                                           const std::function<double(const Point&)>& f) {
  const auto nodes = grid.boundary_nodes(Boundary::kFull);
  const auto supported = grid.boundary_nodes(support);
  std::vector<double> values(nodes.size(), 0.0);
  const std::size_t layer = grid.layer_size();
  for (std::size_t node : supported) {
    const std::size_t k = node < layer ? node : layer + (node - (grid.size() - layer));
    values[k] = f(grid.point(node));
  }
  return BoundaryTrace(grid, support, std::move(values));
}

DirichletSolution solve_dirichlet(const StiffnessSystem& system, const BoundaryTrace& bc) {
  const CylinderGrid& grid = system.grid;
  if (!(bc.grid() == grid)) throw Error(ErrorCode::kShapeMismatch, "trace grid does not match system");
  const auto interior = grid.interior_nodes();
  const auto boundary = grid.boundary_nodes(Boundary::kFull);
  Eigen::VectorXd ub = Eigen::Map<const Eigen::VectorXd>(bc.values().data(), bc.values().size());
  const Eigen::SparseMatrix<double> kib = detail::extract_block(system.matrix, interior, boundary);
  const Eigen::MatrixXd rhs = -(kib * ub);
  detail::InteriorSolver solver(system.matrix, interior, system.has_potential);
  const Eigen::MatrixXd ui = solver.solve(rhs);
  const double rhs_norm = rhs.norm();
  const double residual = (solver.block() * ui - rhs).norm();
  const double relative = rhs_norm > 0.0 ? residual / rhs_norm : residual;
  if (!(relative <= kBackwardErrorLimit)) {
    throw Error(ErrorCode::kNoConvergence,
                "Dirichlet solve residual " + std::to_string(relative) + " exceeds 1e-10");
  }
  std::vector<double> values(grid.size(), 0.0);
  for (std::size_t k = 0; k < boundary.size(); ++k) values[boundary[k]] = ub[k];
  for (std::size_t k = 0; k < interior.size(); ++k) values[interior[k]] = ui(k, 0);
  const double lo = ub.size() ? ub.minCoeff() : 0.0;
  const double hi = ub.size() ? ub.maxCoeff() : 0.0;
  bool max_principle = true;
  if (!system.has_potential) {
    for (double v : values) max_principle = max_principle && v >= lo - 1e-8 && v <= hi + 1e-8;
  }
  return {ScalarField(grid, std::move(values)), relative, max_principle};
}

DNMatrix dn_map_partial(const StiffnessSystem& system, Boundary gamma) {
  const CylinderGrid& grid = system.grid;
  const auto nodes = grid.boundary_nodes(gamma);
  const auto interior = grid.interior_nodes();
  detail::InteriorSolver solver(system.matrix, interior, system.has_potential);
  const Eigen::SparseMatrix<double> krg = detail::extract_block(system.matrix, interior, nodes);
  Eigen::MatrixXd lambda =
      Eigen::MatrixXd(detail::extract_block(system.matrix, nodes, nodes));
  const double block_norm = solver.block().norm();
  const std::size_t m = nodes.size();
  const std::size_t chunks = (m + kSchurChunk - 1) / kSchurChunk;
  std::vector<double> backward(chunks, 0.0);
  parallel_for(chunks, [&](std::size_t chunk) {
    const auto first = static_cast<Eigen::Index>(chunk * kSchurChunk);
    const auto width = static_cast<Eigen::Index>(std::min(kSchurChunk, m - chunk * kSchurChunk));
    const Eigen::MatrixXd rhs = Eigen::MatrixXd(krg.middleCols(first, width));
    const Eigen::MatrixXd x = solver.solve(rhs);
    const double scale = block_norm * x.norm() + rhs.norm();
    backward[chunk] = scale > 0.0 ? (solver.block() * x - rhs).norm() / scale : 0.0;
    lambda.middleCols(first, width).noalias() -= krg.transpose() * x;
  });
  for (double b : backward) {
    if (!(b <= kBackwardErrorLimit)) {
      throw Error(ErrorCode::kNoConvergence,
                  "Schur complement solve backward error " + std::to_string(b));
    }
  }
  return {std::move(lambda), gamma, grid, nodes, system.metric_id, system.potential_id};
}

DNMatrix dn_map_schrodinger(const MetricField& g, const ScalarField& potential, Boundary gamma) {
  return dn_map_partial(assemble_stiffness(g, potential), gamma);
}

std::vector<FourierMode> lowmode_basis(int dim, int cut) {
  if (dim < 2) throw Error(ErrorCode::kDimensionTooSmall, "Fourier modes need dim >= 2");
  if (cut < 0) throw Error(ErrorCode::kInvalidArgument, "mode cut must be non-negative");
  const int k = dim - 1;
  std::vector<std::vector<int>> wavenumbers;
  std::vector<int> m(k, -cut);
  while (true) {
    int norm2 = 0;
    for (int v : m) norm2 += v * v;
    int first = 0;
    for (int v : m) {
      if (v != 0) {
        first = v;
        break;
      }
    }
    if (norm2 > 0 && norm2 <= cut * cut && first > 0) wavenumbers.push_back(m);
    int axis = k - 1;
    while (axis >= 0 && m[axis] == cut) m[axis--] = -cut;
    if (axis < 0) break;
    ++m[axis];
  }
  std::stable_sort(wavenumbers.begin(), wavenumbers.end(), [](const auto& a, const auto& b) {
    int na = 0;
    int nb = 0;
    for (int v : a) na += v * v;
    for (int v : b) nb += v * v;
    return na < nb;
  });
  std::vector<FourierMode> modes{{std::vector<int>(k, 0), false}};
  for (const auto& w : wavenumbers) {
    modes.push_back({w, false});
    modes.push_back({w, true});
  }
  return modes;
}

namespace {

double mode_value(const FourierMode& mode, const Point& p, double area) {
  double arg = 0.0;
  bool constant = true;
  for (std::size_t a = 0; a < mode.wavenumber.size(); ++a) {
    arg += mode.wavenumber[a] * p[static_cast<Eigen::Index>(a) + 1];
    constant = constant && mode.wavenumber[a] == 0;
  }
  if (constant) return 1.0 / std::sqrt(area);
  const double scale = std::sqrt(2.0 / area);
  return scale * (mode.sine ? std::sin(arg) : std::cos(arg));
}

void require_resolved(const CylinderGrid& grid, const std::vector<FourierMode>& modes) {
  for (const auto& mode : modes) {
    for (std::size_t a = 0; a < mode.wavenumber.size(); ++a) {
      if (2 * std::abs(mode.wavenumber[a]) >= grid.extent(static_cast<int>(a) + 1)) {
        throw Error(ErrorCode::kInvalidArgument, "mode cut is not resolved by the angular grid");
      }
    }
  }
}

}  // namespace

Eigen::MatrixXd lowmode_samples(const DNMatrix& dn, const std::vector<FourierMode>& modes) {
  require_resolved(dn.grid, modes);
  const double area = std::pow(2.0 * std::numbers::pi, dn.grid.dim() - 1);
  const std::size_t layer = dn.grid.layer_size();
  const std::size_t layers = dn.gamma == Boundary::kFull ? 2 : 1;
  const auto nm = static_cast<Eigen::Index>(modes.size());
  Eigen::MatrixXd phi = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(dn.nodes.size()),
                                              nm * static_cast<Eigen::Index>(layers));
  for (std::size_t k = 0; k < dn.nodes.size(); ++k) {
    const Point p = dn.grid.point(dn.nodes[k]);
    const auto block = static_cast<Eigen::Index>(k / layer);
    for (Eigen::Index j = 0; j < nm; ++j) {
      phi(static_cast<Eigen::Index>(k), block * nm + j) = mode_value(modes[j], p, area);
    }
  }
  return phi;
}

Eigen::MatrixXd lowmode_matrix(const DNMatrix& dn, int cut) {
  const Eigen::MatrixXd phi = lowmode_samples(dn, lowmode_basis(dn.grid.dim(), cut));
  return phi.transpose() * dn.values * phi;
}

double mode_eigenvalue(const DNMatrix& dn, const FourierMode& mode) {
  if (dn.gamma == Boundary::kFull) {
    throw Error(ErrorCode::kInvalidArgument, "mode eigenvalues are defined per boundary layer");
  }
  const Eigen::VectorXd psi = lowmode_samples(dn, {mode}).col(0);
  return psi.dot(dn.values * psi) / (dn.grid.boundary_weight() * psi.squaredNorm());
}

OperatorGap operator_gap(const DNMatrix& a, const DNMatrix& b, int mode_cut) {
  if (a.gamma != b.gamma || !(a.grid == b.grid) || a.values.rows() != b.values.rows()) {
    throw Error(ErrorCode::kShapeMismatch, "DN matrices differ in boundary set or grid");
  }
  return {frobenius_rel(a.values, b.values), lowmode_gap(a, b, mode_cut)};
}

double lowmode_gap(const DNMatrix& a, const DNMatrix& b, int mode_cut) {
  if (a.gamma != b.gamma || a.grid.dim() != b.grid.dim()) {
    throw Error(ErrorCode::kShapeMismatch, "DN matrices differ in boundary set or dimension");
  }
  return frobenius_rel(lowmode_matrix(a, mode_cut), lowmode_matrix(b, mode_cut));
}

void write_dn_matrix(const DNMatrix& dn, const std::filesystem::path& csv_path) {
  std::ofstream csv(csv_path);
  if (!csv) throw Error(ErrorCode::kIoError, "cannot open " + csv_path.string());
  char buffer[32];
  for (Eigen::Index i = 0; i < dn.values.rows(); ++i) {
    for (Eigen::Index j = 0; j < dn.values.cols(); ++j) {
      std::snprintf(buffer, sizeof buffer, "%.17g", dn.values(i, j));
      csv << (j ? "," : "") << buffer;
    }
    csv << '\n';
  }
  if (!csv) throw Error(ErrorCode::kIoError, "failed writing " + csv_path.string());
  nlohmann::json meta = {{"gamma", to_string(dn.gamma)},
                         {"grid", dn.grid.id()},
                         {"metric_id", dn.metric_id},
                         {"potential_id", dn.potential_id}};
  auto meta_path = csv_path;
  meta_path.replace_extension(".json");
  std::ofstream sidecar(meta_path);
  sidecar << meta.dump(2) << '\n';
  if (!sidecar) throw Error(ErrorCode::kIoError, "failed writing " + meta_path.string());
}

Eigen::MatrixXd read_dn_csv(const std::filesystem::path& csv_path) {
  std::ifstream in(csv_path);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + csv_path.string());
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
    rows.push_back(std::move(row));
  }
  Eigen::MatrixXd m(rows.size(), rows.empty() ? 0 : rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (static_cast<Eigen::Index>(rows[i].size()) != m.cols()) {
      throw Error(ErrorCode::kMalformedContainer, "ragged DN matrix CSV");
    }
    for (std::size_t j = 0; j < rows[i].size(); ++j) m(i, j) = rows[i][j];
  }
  return m;
}

}  // namespace calderon
