#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "calderon/types.hpp"

namespace calderon {

/// Boundary node sets of the cylinder: the t = 0 end, the t = 1 end, or both.
enum class Boundary { kGamma0, kGamma1, kFull };

std::string to_string(Boundary boundary);
Boundary boundary_from_string(const std::string& name);

/// One entry of a multilinear interpolation stencil.
struct StencilWeight {
  std::size_t node;
  double weight;
};

/// Uniform tensor-product discretization of [0,1] x T^{n-1}.
///
/// Axis 0 is the non-periodic t direction (endpoints included); axes
/// 1..n-1 are periodic angles on [0, 2pi) without a duplicated endpoint.
/// Nodes are numbered lexicographically with t slowest, so the t = 0 and
/// t = 1 layers are the first and last contiguous blocks.
class CylinderGrid {
 public:
  CylinderGrid(int nt, std::vector<int> n_angular);

  int dim() const { return 1 + static_cast<int>(n_angular_.size()); }
  int nt() const { return nt_; }
  int extent(int axis) const { return axis == 0 ? nt_ : n_angular_[axis - 1]; }
  const std::vector<int>& angular_extents() const { return n_angular_; }
  double spacing(int axis) const { return spacing_[axis]; }

  std::size_t size() const { return layer_size_ * static_cast<std::size_t>(nt_); }
  std::size_t layer_size() const { return layer_size_; }
  std::size_t stride(int axis) const { return stride_[axis]; }

  /// Linear index of a multi-index; angular components wrap periodically.
  std::size_t index(const MultiIndex& multi) const;
  MultiIndex multi_index(std::size_t node) const;
  int t_index(std::size_t node) const { return static_cast<int>(node / layer_size_); }

  Point point(std::size_t node) const;

  /// Neighbor along one axis, wrapping in angle; empty when leaving [0,1] in t.
  std::optional<std::size_t> neighbor(std::size_t node, int axis, int offset) const;

  bool is_boundary(std::size_t node) const;
  std::vector<std::size_t> boundary_nodes(Boundary boundary) const;
  std::vector<std::size_t> interior_nodes() const;

  /// Trapezoid weight in t times rectangle weights in every angle.
  double quadrature_weight(std::size_t node) const;
  /// Rectangle-rule weight of a node inside a boundary layer (area element of T^{n-1}).
  double boundary_weight() const;

  /// Multilinear interpolation weights at an arbitrary point (angles wrap).
  std::vector<StencilWeight> interpolation_stencil(const Point& p) const;

  /// Dyadic subsampling: keeps every factor-th node in every direction.
  CylinderGrid coarsened(int factor) const;
  bool can_coarsen(int factor) const;

  std::string id() const;

  bool operator==(const CylinderGrid& other) const {
    return nt_ == other.nt_ && n_angular_ == other.n_angular_;
  }

 private:
  int nt_;
  std::vector<int> n_angular_;
  std::size_t layer_size_ = 1;
  std::vector<std::size_t> stride_;
  std::vector<double> spacing_;
};

}  // namespace calderon
