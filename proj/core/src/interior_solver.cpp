#include "interior_solver.hpp"

#include <cmath>
#include <limits>
#include <mutex>

#include <Eigen/CholmodSupport>
#include <Eigen/SparseCholesky>

#include "calderon/error.hpp"

namespace calderon::detail {

namespace {

constexpr double kConditionLimit = 1e10;
constexpr int kInverseIterations = 30;

}  // namespace

struct InteriorSolver::Impl {
  Eigen::CholmodSimplicialLLT<Eigen::SparseMatrix<double>> llt;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt;
  bool use_llt = false;
  // cholmod_common is mutable workspace, so CHOLMOD solves are serialized.
  mutable std::mutex mutex;
};

Eigen::SparseMatrix<double> extract_block(const Eigen::SparseMatrix<double>& k,
                                          const std::vector<std::size_t>& rows,
                                          const std::vector<std::size_t>& cols) {
  std::vector<int> row_map(k.rows(), -1);
  std::vector<int> col_map(k.cols(), -1);
  for (std::size_t i = 0; i < rows.size(); ++i) row_map[rows[i]] = static_cast<int>(i);
  for (std::size_t j = 0; j < cols.size(); ++j) col_map[cols[j]] = static_cast<int>(j);
  std::vector<Eigen::Triplet<double>> entries;
  for (int outer = 0; outer < k.outerSize(); ++outer) {
    const int c = col_map[outer];
    if (c < 0) continue;
    for (Eigen::SparseMatrix<double>::InnerIterator it(k, outer); it; ++it) {
      const int r = row_map[it.row()];
      if (r >= 0) entries.emplace_back(r, c, it.value());
    }
  }
  Eigen::SparseMatrix<double> block(static_cast<Eigen::Index>(rows.size()),
                                    static_cast<Eigen::Index>(cols.size()));
  block.setFromTriplets(entries.begin(), entries.end());
  return block;
}

InteriorSolver::InteriorSolver(const Eigen::SparseMatrix<double>& k,
                               const std::vector<std::size_t>& rows, bool check_condition)
    : impl_(std::make_unique<Impl>()), block_(extract_block(k, rows, rows)) {
  impl_->llt.cholmod().print = 0;
  impl_->llt.compute(block_);
  if (impl_->llt.info() == Eigen::Success) {
    impl_->use_llt = true;
    positive_definite_ = true;
  } else {
    impl_->ldlt.compute(block_);
    if (impl_->ldlt.info() != Eigen::Success) {
      throw Error(ErrorCode::kSingularInteriorBlock, "interior block factorization failed");
    }
    const Eigen::VectorXd d = impl_->ldlt.vectorD();
    const double scale = d.cwiseAbs().maxCoeff();
    for (Eigen::Index i = 0; i < d.size(); ++i) {
      if (!(std::abs(d[i]) > std::numeric_limits<double>::epsilon() * scale)) {
        throw Error(ErrorCode::kSingularInteriorBlock, "zero pivot in interior block",
                    static_cast<std::size_t>(i));
      }
    }
  }
  if (!check_condition || block_.rows() == 0) return;

  // Gershgorin bound for the largest |eigenvalue|, inverse iteration for the smallest.
  double lambda_max = 0.0;
  Eigen::VectorXd row_sums = Eigen::VectorXd::Zero(block_.rows());
  for (int outer = 0; outer < block_.outerSize(); ++outer) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(block_, outer); it; ++it) {
      row_sums[it.row()] += std::abs(it.value());
    }
  }
  lambda_max = row_sums.maxCoeff();
  Eigen::MatrixXd x = Eigen::MatrixXd::Ones(block_.rows(), 1);
  for (Eigen::Index i = 0; i < x.rows(); ++i) x(i, 0) += 0.01 * std::sin(1.0 + i);
  x /= x.norm();
  double inverse_norm = 0.0;
  for (int iter = 0; iter < kInverseIterations; ++iter) {
    Eigen::MatrixXd y = solve(x);
    inverse_norm = y.norm();
    if (!std::isfinite(inverse_norm)) {
      throw Error(ErrorCode::kSingularInteriorBlock, "interior solve is not finite");
    }
    x = y / inverse_norm;
  }
  condition_ = lambda_max * inverse_norm;
  if (!(condition_ < kConditionLimit)) {
    throw Error(ErrorCode::kSingularInteriorBlock,
                "interior block condition estimate " + std::to_string(condition_) +
                    " exceeds 1e10");
  }
}

InteriorSolver::~InteriorSolver() = default;

Eigen::MatrixXd InteriorSolver::solve(const Eigen::MatrixXd& rhs) const {
  if (impl_->use_llt) {
    std::lock_guard<std::mutex> lock(impl_->mutex);
    return impl_->llt.solve(rhs);
  }
  return impl_->ldlt.solve(rhs);
}

}  // namespace calderon::detail
