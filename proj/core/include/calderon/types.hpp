#pragma once

#include <array>
#include <cstddef>

#include <Eigen/Core>

namespace calderon {

/// Largest manifold dimension supported by the fixed-capacity small matrices.
inline constexpr int kMaxDim = 6;

/// Coordinates (t, x_1, ..., x_{n-1}) of a point on the cylinder.
using Point = Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::ColMajor, kMaxDim, 1>;

/// Components of a one-form in the coordinate basis (dt, dx_1, ...).
using Covector = Point;

/// Small dense matrix with heap-free storage; used for metric tensors.
using SymMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor, kMaxDim, kMaxDim>;

using MultiIndex = std::array<int, kMaxDim>;

// Absolute tolerances shared across modules.
inline constexpr double kExactTol = 1e-12;
inline constexpr double kSolverTol = 1e-10;

}  // namespace calderon
