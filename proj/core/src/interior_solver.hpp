#pragma once

#include <memory>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace calderon::detail {

/// Factorization of the principal submatrix K[rows, rows].
///
/// Tries CHOLMOD LL^T first and falls back to an LDL^T factorization for
/// indefinite blocks. With check_condition set, a condition estimate at or
/// above 1e10 raises SingularInteriorBlock.
class InteriorSolver {
 public:
  InteriorSolver(const Eigen::SparseMatrix<double>& k, const std::vector<std::size_t>& rows,
                 bool check_condition);
  ~InteriorSolver();
  InteriorSolver(const InteriorSolver&) = delete;
  InteriorSolver& operator=(const InteriorSolver&) = delete;

  const Eigen::SparseMatrix<double>& block() const { return block_; }
  Eigen::MatrixXd solve(const Eigen::MatrixXd& rhs) const;
  bool positive_definite() const { return positive_definite_; }
  double condition_estimate() const { return condition_; }

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  Eigen::SparseMatrix<double> block_;
  bool positive_definite_ = false;
  double condition_ = 0.0;
};

/// K[rows, cols] as a sparse matrix.
Eigen::SparseMatrix<double> extract_block(const Eigen::SparseMatrix<double>& k,
                                          const std::vector<std::size_t>& rows,
                                          const std::vector<std::size_t>& cols);

}  // namespace calderon::detail
