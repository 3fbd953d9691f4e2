#include "calderon/grid.hpp"

#include <cmath>
#include <numbers>

#include "calderon/error.hpp"

namespace calderon {

std::string to_string(Boundary boundary) {
  switch (boundary) {
    case Boundary::kGamma0: return "gamma0";
    case Boundary::kGamma1: return "gamma1";
    case Boundary::kFull: return "full";
  }
  return "unknown";
}

Boundary boundary_from_string(const std::string& name) {
  if (name == "gamma0") return Boundary::kGamma0;
  if (name == "gamma1") return Boundary::kGamma1;
  if (name == "full") return Boundary::kFull;
  throw Error(ErrorCode::kInvalidArgument, "unknown boundary set '" + name + "'");
}

CylinderGrid::CylinderGrid(int nt, std::vector<int> n_angular)
    : nt_(nt), n_angular_(std::move(n_angular)) {
  if (n_angular_.empty() || static_cast<int>(n_angular_.size()) + 1 > kMaxDim) {
    throw Error(ErrorCode::kInvalidArgument,
                "cylinder dimension must lie in [2, " + std::to_string(kMaxDim) + "]");
  }
  if (nt_ < 3) {
    throw Error(ErrorCode::kInvalidArgument, "need at least 3 nodes in t");
  }
  for (int n : n_angular_) {
    if (n < 4) {
      throw Error(ErrorCode::kInvalidArgument, "need at least 4 nodes per angular direction");
    }
  }
  const int d = dim();
  stride_.assign(d, 1);
  for (int axis = d - 1; axis >= 1; --axis) {
    if (axis < d - 1) stride_[axis] = stride_[axis + 1] * n_angular_[axis];
  }
  layer_size_ = 1;
  for (int n : n_angular_) layer_size_ *= static_cast<std::size_t>(n);
  stride_[0] = layer_size_;

  spacing_.resize(d);
  spacing_[0] = 1.0 / (nt_ - 1);
  for (int axis = 1; axis < d; ++axis) {
    spacing_[axis] = 2.0 * std::numbers::pi / n_angular_[axis - 1];
  }
}

std::size_t CylinderGrid::index(const MultiIndex& multi) const {
  std::size_t idx = static_cast<std::size_t>(multi[0]) * stride_[0];
  for (int axis = 1; axis < dim(); ++axis) {
    const int n = n_angular_[axis - 1];
    int k = multi[axis] % n;
    if (k < 0) k += n;
    idx += static_cast<std::size_t>(k) * stride_[axis];
  }
  return idx;
}

MultiIndex CylinderGrid::multi_index(std::size_t node) const {
  MultiIndex multi{};
  for (int axis = 0; axis < dim(); ++axis) {
    multi[axis] = static_cast<int>(node / stride_[axis]);
    node %= stride_[axis];
  }
  return multi;
}

Point CylinderGrid::point(std::size_t node) const {
  const MultiIndex multi = multi_index(node);
  Point p(dim());
  for (int axis = 0; axis < dim(); ++axis) p[axis] = multi[axis] * spacing_[axis];
  return p;
}

std::optional<std::size_t> CylinderGrid::neighbor(std::size_t node, int axis, int offset) const {
  if (axis == 0) {
    const int it = t_index(node) + offset;
    if (it < 0 || it >= nt_) return std::nullopt;
    return node + static_cast<std::ptrdiff_t>(offset) * static_cast<std::ptrdiff_t>(layer_size_);
  }
  const int n = n_angular_[axis - 1];
  const int k = static_cast<int>((node / stride_[axis]) % n);
  int kk = (k + offset) % n;
  if (kk < 0) kk += n;
  return node + (static_cast<std::ptrdiff_t>(kk) - k) * static_cast<std::ptrdiff_t>(stride_[axis]);
}

bool CylinderGrid::is_boundary(std::size_t node) const {
  const int it = t_index(node);
  return it == 0 || it == nt_ - 1;
}

std::vector<std::size_t> CylinderGrid::boundary_nodes(Boundary boundary) const {
  std::vector<std::size_t> nodes;
  if (boundary != Boundary::kGamma1) {
    for (std::size_t i = 0; i < layer_size_; ++i) nodes.push_back(i);
  }
  if (boundary != Boundary::kGamma0) {
    const std::size_t offset = layer_size_ * static_cast<std::size_t>(nt_ - 1);
    for (std::size_t i = 0; i < layer_size_; ++i) nodes.push_back(offset + i);
  }
  return nodes;
}

std::vector<std::size_t> CylinderGrid::interior_nodes() const {
  std::vector<std::size_t> nodes;
  nodes.reserve(layer_size_ * static_cast<std::size_t>(nt_ - 2));
  for (std::size_t i = layer_size_; i < layer_size_ * static_cast<std::size_t>(nt_ - 1); ++i) {
    nodes.push_back(i);
  }
  return nodes;
}

double CylinderGrid::boundary_weight() const {
  double w = 1.0;
  for (int axis = 1; axis < dim(); ++axis) w *= spacing_[axis];
  return w;
}

double CylinderGrid::quadrature_weight(std::size_t node) const {
  const double wt = is_boundary(node) ? 0.5 * spacing_[0] : spacing_[0];
  return wt * boundary_weight();
}

std::vector<StencilWeight> CylinderGrid::interpolation_stencil(const Point& p) const {
  const int d = dim();
  MultiIndex base{};
  std::array<double, kMaxDim> frac{};
  for (int axis = 0; axis < d; ++axis) {
    const double s = p[axis] / spacing_[axis];
    int cell = static_cast<int>(std::floor(s));
    if (axis == 0) {
      if (cell < 0) cell = 0;
      if (cell > nt_ - 2) cell = nt_ - 2;
    }
    base[axis] = cell;
    frac[axis] = s - cell;
  }
  std::vector<StencilWeight> stencil;
  stencil.reserve(std::size_t{1} << d);
  for (unsigned corner = 0; corner < (1u << d); ++corner) {
    MultiIndex multi = base;
    double w = 1.0;
    for (int axis = 0; axis < d; ++axis) {
      const bool upper = (corner >> axis) & 1u;
      multi[axis] += upper ? 1 : 0;
      w *= upper ? frac[axis] : 1.0 - frac[axis];
    }
    stencil.push_back({index(multi), w});
  }
  return stencil;
}

bool CylinderGrid::can_coarsen(int factor) const {
  if (factor < 1 || (nt_ - 1) % factor != 0 || (nt_ - 1) / factor + 1 < 3) return false;
  for (int n : n_angular_) {
    if (n % factor != 0 || n / factor < 4) return false;
  }
  return true;
}

CylinderGrid CylinderGrid::coarsened(int factor) const {
  if (!can_coarsen(factor)) {
    throw Error(ErrorCode::kGridMismatch,
                "grid " + id() + " cannot be coarsened by " + std::to_string(factor));
  }
  std::vector<int> ang;
  for (int n : n_angular_) ang.push_back(n / factor);
  return CylinderGrid((nt_ - 1) / factor + 1, std::move(ang));
}

std::string CylinderGrid::id() const {
  std::string s = "n" + std::to_string(dim()) + "_t" + std::to_string(nt_) + "_a";
  for (std::size_t k = 0; k < n_angular_.size(); ++k) {
    if (k) s += "x";
    s += std::to_string(n_angular_[k]);
  }
  return s;
}

}  // namespace calderon
