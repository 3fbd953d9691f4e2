#include "calderon/miller.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>

#include "calderon/error.hpp"
#include "calderon/parallel.hpp"

namespace calderon {

MillerDataset MillerDataset::zeros(const CylinderGrid& grid, double T, double rho, double alpha) {
  if (grid.dim() != 3) throw Error(ErrorCode::kUnsupportedDimension, "Miller data lives on a 3-D grid");
  MillerDataset d;
  d.grid = grid;
  d.a1.assign(grid.size(), 0.0);
  d.a2.assign(grid.size(), 0.0);
  d.a3.assign(grid.size(), 0.0);
  d.u.assign(grid.size(), 0.0);
  d.A1.assign(grid.nt(), 0.0);
  d.A3.assign(grid.nt(), 0.0);
  d.T = T;
  d.rho = rho;
  d.alpha = alpha;
  return d;
}

void MillerDataset::check_shapes() const {
  if (grid.dim() != 3) throw Error(ErrorCode::kUnsupportedDimension, "Miller data lives on a 3-D grid");
  for (const auto* f : {&a1, &a2, &a3, &u}) {
    if (f->size() != grid.size()) throw Error(ErrorCode::kShapeMismatch, "node field size differs from grid");
  }
  for (const auto* f : {&A1, &A3}) {
    if (f->size() != static_cast<std::size_t>(grid.nt())) {
      throw Error(ErrorCode::kShapeMismatch, "t array size differs from N_t");
    }
  }
}

MillerDataset MillerDataset::subsampled(int factor) const {
  const CylinderGrid coarse = grid.coarsened(factor);
  MillerDataset out = zeros(coarse, T, rho, alpha);
  for (std::size_t node = 0; node < coarse.size(); ++node) {
    MultiIndex m = coarse.multi_index(node);
    for (int a = 0; a < 3; ++a) m[a] *= factor;
    const std::size_t fine = grid.index(m);
    out.a1[node] = a1[fine];
    out.a2[node] = a2[fine];
    out.a3[node] = a3[fine];
    out.u[node] = u[fine];
  }
  for (int k = 0; k < coarse.nt(); ++k) {
    out.A1[k] = A1[k * factor];
    out.A3[k] = A3[k * factor];
  }
  return out;
}

SymMatrix miller_matrix(const MillerDataset& data, std::size_t node) {
  const int k = data.grid.t_index(node);
  SymMatrix m = SymMatrix::Zero(3, 3);
  m(0, 0) = 1.0;
  m(1, 1) = 1.0 + data.a1[node] + data.A1[k];
  m(1, 2) = data.a2[node];
  m(2, 1) = data.a2[node];
  m(2, 2) = 1.0 + data.a3[node] + data.A3[k];
  return m;
}

MatrixField miller_weight_field(const MillerDataset& data) {
  data.check_shapes();
  std::vector<SymMatrix> values(data.grid.size());
  for (std::size_t node = 0; node < values.size(); ++node) values[node] = miller_matrix(data, node);
  return MatrixField(data.grid, std::move(values));
}

namespace {

struct Coefficients {
  double b11, b12, b22, det;
};

Coefficients coefficients_at(const MillerDataset& data, std::size_t node) {
  const int k = data.grid.t_index(node);
  Coefficients c;
  c.b11 = 1.0 + data.A1[k] + data.a1[node];
  c.b22 = 1.0 + data.A3[k] + data.a3[node];
  c.b12 = data.a2[node];
  c.det = c.b11 * c.b22 - c.b12 * c.b12;
  if (!(c.det > 0.0)) {
    throw Error(ErrorCode::kDegenerateDeterminant, "D = det A is not positive", node);
  }
  return c;
}

}  // namespace

MetricField assemble_counterexample_metric_3d(const MillerDataset& data, const CylinderGrid& grid) {
  data.check_shapes();
  if (!(grid == data.grid)) throw Error(ErrorCode::kGridMismatch, "grid differs from dataset grid");
  std::vector<SymMatrix> samples(grid.size());
  for (std::size_t node = 0; node < grid.size(); ++node) {
    const Coefficients c = coefficients_at(data, node);
    SymMatrix g = SymMatrix::Zero(3, 3);
    g(0, 0) = c.det;
    g(1, 1) = c.b22;
    g(1, 2) = -c.b12;
    g(2, 1) = -c.b12;
    g(2, 2) = c.b11;
    samples[node] = g;
  }
  return MetricField::from_samples(grid, std::move(samples), "counterexample3d");
}

namespace {

std::size_t dataset_node(const MillerDataset& data, const CylinderGrid& grid, std::size_t node) {
  const MultiIndex m = grid.multi_index(node);
  MultiIndex base{};
  base[0] = m[0];
  base[1] = m[1];
  base[2] = m[2];
  return data.grid.index(base);
}

void require_compatible(const MillerDataset& data, const CylinderGrid& grid) {
  if (grid.dim() < 3) throw Error(ErrorCode::kDimensionTooSmall, "counterexample metric needs n >= 3");
  if (grid.nt() != data.grid.nt() || grid.extent(1) != data.grid.extent(1) ||
      grid.extent(2) != data.grid.extent(2)) {
    throw Error(ErrorCode::kGridMismatch, "first three axes differ from dataset grid");
  }
}

}  // namespace

MetricField assemble_counterexample_metric_nd(const MillerDataset& data, const CylinderGrid& grid) {
  data.check_shapes();
  require_compatible(data, grid);
  const int n = grid.dim();
  std::vector<SymMatrix> samples(grid.size());
  for (std::size_t node = 0; node < grid.size(); ++node) {
    const Coefficients c = coefficients_at(data, dataset_node(data, grid, node));
    const double scale = std::pow(c.det, 1.0 / (n - 2));
    SymMatrix g = SymMatrix::Identity(n, n);
    g(1, 1) = c.b22 / c.det;
    g(1, 2) = -c.b12 / c.det;
    g(2, 1) = -c.b12 / c.det;
    g(2, 2) = c.b11 / c.det;
    samples[node] = scale * g;
  }
  return MetricField::from_samples(grid, std::move(samples),
                                   "counterexample" + std::to_string(n) + "d");
}

ScalarField lift_to_grid(const MillerDataset& data, const std::vector<double>& field,
                         const CylinderGrid& grid) {
  require_compatible(data, grid);
  if (field.size() != data.grid.size()) throw Error(ErrorCode::kShapeMismatch, "field is not on the dataset grid");
  std::vector<double> values(grid.size());
  for (std::size_t node = 0; node < grid.size(); ++node) values[node] = field[dataset_node(data, grid, node)];
  return ScalarField(grid, std::move(values));
}

double weight_identity_check(const MillerDataset& data, const CylinderGrid& grid) {
  if (grid.dim() != 3) throw Error(ErrorCode::kUnsupportedDimension, "weight identity is for n = 3");
  const MetricField g = assemble_counterexample_metric_3d(data, grid);
  const MatrixField w = weight_field(g);
  double worst = 0.0;
  for (std::size_t node = 0; node < grid.size(); ++node) {
    worst = std::max(worst, (w[node] - miller_matrix(data, node)).cwiseAbs().maxCoeff());
  }
  return worst;
}

ScalarField miller_residual(const MillerDataset& data) {
  return divergence_form_apply(miller_weight_field(data), ScalarField(data.grid, data.u));
}

ResidualNorms residual_norms(const ScalarField& r) {
  ResidualNorms out{0.0, 0.0};
  const CylinderGrid& grid = r.grid();
  for (std::size_t node = 0; node < grid.size(); ++node) {
    out.max = std::max(out.max, std::abs(r[node]));
    out.l2 += r[node] * r[node] * grid.quadrature_weight(node);
  }
  out.l2 = std::sqrt(out.l2);
  return out;
}

double holder_quotient(const std::vector<double>& values, const std::vector<double>& t, double rho) {
  if (values.size() != t.size()) throw Error(ErrorCode::kShapeMismatch, "values and t differ in length");
  double worst = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    for (std::size_t j = i + 1; j < values.size(); ++j) {
      const double dt = std::abs(t[j] - t[i]);
      if (dt > 0.0) worst = std::max(worst, std::abs(values[j] - values[i]) / std::pow(dt, rho));
    }
  }
  return worst;
}

bool ValidationReport::passed() const {
  return std::none_of(checks.begin(), checks.end(), [](const auto& c) { return c.status == "fail"; });
}

const CheckResult* ValidationReport::find(const std::string& item) const {
  for (const auto& c : checks) {
    if (c.item == item) return &c;
  }
  return nullptr;
}

nlohmann::json ValidationReport::to_json() const {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& c : checks) {
    nlohmann::json values = nlohmann::json::object();
    for (const auto& [k, v] : c.values) values[k] = v;
    out.push_back({{"item", c.item},
                   {"status", c.status},
                   {"code", c.code},
                   {"detail", c.detail},
                   {"values", values}});
  }
  return {{"passed", passed()}, {"checks", out}};
}

namespace {

CheckResult vanishing_check(const MillerDataset& data, double tol) {
  CheckResult r{"vanishing", "pass", "", "coefficients and u vanish for t >= T", {}};
  double worst = 0.0;
  std::size_t layers = 0;
  for (int k = 0; k < data.grid.nt(); ++k) {
    const double t = k * data.grid.spacing(0);
    if (t < data.T - 1e-14) continue;
    ++layers;
    worst = std::max({worst, std::abs(data.A1[k]), std::abs(data.A3[k])});
    const std::size_t first = static_cast<std::size_t>(k) * data.grid.layer_size();
    for (std::size_t node = first; node < first + data.grid.layer_size(); ++node) {
      worst = std::max({worst, std::abs(data.a1[node]), std::abs(data.a2[node]),
                        std::abs(data.a3[node]), std::abs(data.u[node])});
    }
  }
  r.values["max_abs"] = worst;
  r.values["layers"] = static_cast<double>(layers);
  if (!(worst <= tol)) {
    r.status = "fail";
    r.code = "VanishingViolated";
    r.detail = "nonzero data at t >= T";
  }
  return r;
}

CheckResult holder_check(const MillerDataset& data, double limit) {
  CheckResult r{"holder", "pass", "", "", {}};
  if (!(data.rho > 0.0 && data.rho < 1.0)) {
    r.status = "fail";
    r.code = "InvalidHolderOrder";
    r.detail = "declared rho must lie in (0, 1)";
    return r;
  }
  const double rho_prime = 0.5 * (1.0 + data.rho);
  std::vector<int> factors;
  for (int f = 1; (data.grid.nt() - 1) % f == 0 && (data.grid.nt() - 1) / f >= 4; f *= 2) factors.push_back(f);
  double growth = 0.0;
  double growth_prime = 0.0;
  for (const auto* coefficient : {&data.A1, &data.A3}) {
    std::vector<double> h_rho;
    std::vector<double> h_prime;
    for (int f : factors) {
      std::vector<double> values;
      std::vector<double> t;
      for (int k = 0; k < data.grid.nt(); k += f) {
        values.push_back((*coefficient)[k]);
        t.push_back(k * data.grid.spacing(0));
      }
      h_rho.push_back(holder_quotient(values, t, data.rho));
      h_prime.push_back(holder_quotient(values, t, rho_prime));
    }
    // Finest over coarsest; a zero coarse quotient only passes when the fine one is zero too.
    auto ratio = [](double fine, double coarse) {
      if (coarse > 0.0) return fine / coarse;
      return fine > 0.0 ? std::numeric_limits<double>::infinity() : 1.0;
    };
    growth = std::max(growth, ratio(h_rho.front(), h_rho.back()));
    growth_prime = std::max(growth_prime, ratio(h_prime.front(), h_prime.back()));
    const std::string name = coefficient == &data.A1 ? "A1" : "A3";
    r.values["H_rho_" + name] = h_rho.front();
    r.values["H_rho_prime_" + name] = h_prime.front();
  }
  r.values["levels"] = static_cast<double>(factors.size());
  r.values["growth_rho"] = growth;
  r.values["growth_rho_prime"] = growth_prime;
  r.values["rho"] = data.rho;
  r.values["rho_prime"] = rho_prime;
  if (growth <= limit) {
    r.detail = "quotient at declared rho stable under dyadic subsampling (consistent, not certified)";
  } else {
    r.status = "fail";
    r.code = "HolderQuotientGrowth";
    r.detail = "quotient at declared rho grows under refinement";
  }
  return r;
}

CheckResult ellipticity_check(const MillerDataset& data) {
  CheckResult r{"ellipticity", "pass", "", "eigenvalues of A within [alpha, 1/alpha]", {}};
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (std::size_t node = 0; node < data.grid.size(); ++node) {
    const auto b = symmetric_eigen_bounds(miller_matrix(data, node));
    lo = std::min(lo, b.lambda_min);
    hi = std::max(hi, b.lambda_max);
  }
  r.values["lambda_min"] = lo;
  r.values["lambda_max"] = hi;
  r.values["alpha"] = data.alpha;
  if (!(lo >= data.alpha - kExactTol && hi <= 1.0 / data.alpha + kExactTol)) {
    r.status = "fail";
    r.code = "EllipticityViolated";
    r.detail = "eigenvalues leave [alpha, 1/alpha]";
  }
  return r;
}

}  // namespace

ValidationReport validate_miller_properties(const MillerDataset& data, const ValidationOptions& options) {
  data.check_shapes();
  ValidationReport report;
  report.checks.push_back(vanishing_check(data, options.vanishing_tol));
  report.checks.push_back(holder_check(data, options.holder_growth_limit));
  report.checks.push_back({"periodicity", "pass", "", "enforced by the periodic grid", {}});
  report.checks.push_back(ellipticity_check(data));

  const ResidualNorms norms = residual_norms(miller_residual(data));
  CheckResult residual{"solution", "pass", "", "divergence-form residual of u", {}};
  residual.values["max"] = norms.max;
  residual.values["l2"] = norms.l2;
  if (!(norms.max <= options.residual_tol)) {
    residual.status = "warn";
    residual.code = "ResidualAboveTolerance";
    residual.detail = "u is not a discrete solution at this tolerance";
  }
  report.checks.push_back(residual);

  double u_max = 0.0;
  for (double v : data.u) u_max = std::max(u_max, std::abs(v));
  CheckResult nontrivial{"nontrivial", "pass", "", "u is nonzero somewhere on the grid", {{"max_abs_u", u_max}}};
  if (u_max == 0.0) {
    nontrivial.status = "warn";
    nontrivial.code = "TrivialDataset";
    nontrivial.detail = "trivial dataset: u vanishes identically";
  }
  report.checks.push_back(nontrivial);
  return report;
}

}  // namespace calderon
