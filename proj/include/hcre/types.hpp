// Core value types shared by every module: dimension-checked symmetric
// positive-definite matrices, nonnegative coupling matrices, and families
// of per-node covariances.
#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <utility>
#include <vector>

namespace hcre {

using Eigen::MatrixXd;
using Eigen::VectorXd;

/// Thrown when an input violates a documented precondition.
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Thrown when a numerical procedure fails (divergence, non-convergence,
/// loss of positive definiteness).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// (m + m^T)/2.
inline MatrixXd symmetrized(const MatrixXd& m) { return 0.5 * (m + m.transpose()); }

/// Dense symmetric positive-definite matrix.
///
/// Every construction symmetrizes the input (Riccati-style iterations
/// accumulate asymmetry in the last bits) and verifies positive
/// definiteness through a Cholesky factorization, which fails on
/// non-positive pivots. The factorization is kept for cheap inversion.
class SpdMatrix {
 public:
  explicit SpdMatrix(const MatrixXd& m);

  static SpdMatrix identity(Eigen::Index dim);
  static SpdMatrix scaled_identity(Eigen::Index dim, double scale);

  Eigen::Index dim() const { return mat_.rows(); }
  const MatrixXd& mat() const { return mat_; }
  double trace() const { return mat_.trace(); }

  /// Inverse via the cached Cholesky factor.
  MatrixXd inverse() const;

  /// Solve this * x = rhs.
  MatrixXd solve(const MatrixXd& rhs) const;
  VectorXd solve(const VectorXd& rhs) const;

  /// Lower Cholesky factor.
  MatrixXd cholesky_factor() const { return llt_.matrixL(); }

 private:
  MatrixXd mat_;
  Eigen::LLT<MatrixXd> llt_;
};

/// Square matrix with nonnegative entries; remembers whether it is
/// row stochastic (unit row sums within 1e-12).
class NonnegativeMatrix {
 public:
  explicit NonnegativeMatrix(const MatrixXd& m);

  Eigen::Index size() const { return mat_.rows(); }
  const MatrixXd& mat() const { return mat_; }
  bool row_stochastic() const { return row_stochastic_; }

  double operator()(Eigen::Index i, Eigen::Index j) const { return mat_(i, j); }

  /// Entrywise power pattern helper: this^k as a NonnegativeMatrix.
  NonnegativeMatrix power(int k) const;

 private:
  MatrixXd mat_;
  bool row_stochastic_;
};

/// N symmetric positive-definite matrices of a common dimension; the
/// iterates and solutions of the coupled Riccati maps.
class CovarianceFamily {
 public:
  explicit CovarianceFamily(std::vector<SpdMatrix> mats);

  static CovarianceFamily constant(int count, const SpdMatrix& value);
  static CovarianceFamily identity(int count, Eigen::Index dim);
  static CovarianceFamily scaled_identity(int count, Eigen::Index dim, double scale);

  int count() const { return static_cast<int>(mats_.size()); }
  Eigen::Index dim() const { return mats_.front().dim(); }
  const SpdMatrix& operator[](int i) const { return mats_.at(static_cast<size_t>(i)); }
  const std::vector<SpdMatrix>& mats() const { return mats_; }

  VectorXd traces() const;

 private:
  std::vector<SpdMatrix> mats_;
};

}  // namespace hcre
