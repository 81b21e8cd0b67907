#include "hcre/types.hpp"

#include <cmath>
#include <string>

namespace hcre {

namespace {

void check_square(const MatrixXd& m, const char* what) {
  if (m.rows() == 0 || m.rows() != m.cols()) {
    throw PreconditionError(std::string(what) + ": expected a nonempty square matrix, got " +
                            std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
  }
}

}  // namespace

SpdMatrix::SpdMatrix(const MatrixXd& m) {
  check_square(m, "SpdMatrix");
  mat_ = symmetrized(m);
  llt_.compute(mat_);
  if (llt_.info() != Eigen::Success) {
    throw NumericalError("SpdMatrix: matrix is not positive definite (Cholesky failed)");
  }
#ifndef NDEBUG
  // Debug builds double-check with an eigenvalue decomposition.
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(mat_, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() <= 0.0) {
    throw NumericalError("SpdMatrix: non-positive eigenvalue " +
                         std::to_string(es.eigenvalues().minCoeff()));
  }
#endif
}

SpdMatrix SpdMatrix::identity(Eigen::Index dim) {
  return SpdMatrix(MatrixXd::Identity(dim, dim));
}

SpdMatrix SpdMatrix::scaled_identity(Eigen::Index dim, double scale) {
  if (scale <= 0.0) throw PreconditionError("SpdMatrix: scale must be positive");
  return SpdMatrix(scale * MatrixXd::Identity(dim, dim));
}

MatrixXd SpdMatrix::inverse() const {
  return llt_.solve(MatrixXd::Identity(dim(), dim()));
}

MatrixXd SpdMatrix::solve(const MatrixXd& rhs) const { return llt_.solve(rhs); }

VectorXd SpdMatrix::solve(const VectorXd& rhs) const { return llt_.solve(rhs); }

NonnegativeMatrix::NonnegativeMatrix(const MatrixXd& m) : mat_(m) {
  check_square(m, "NonnegativeMatrix");
  if ((mat_.array() < 0.0).any()) {
    throw PreconditionError("NonnegativeMatrix: negative entry");
  }
  row_stochastic_ = ((mat_.rowwise().sum().array() - 1.0).abs() <= 1e-12).all();
}

NonnegativeMatrix NonnegativeMatrix::power(int k) const {
  if (k < 0) throw PreconditionError("NonnegativeMatrix::power: negative exponent");
  MatrixXd acc = MatrixXd::Identity(size(), size());
  MatrixXd base = mat_;
  for (int e = k; e > 0; e >>= 1) {
    if (e & 1) acc = acc * base;
    if (e > 1) base = base * base;
  }
  // Clamp the tiny negative dust that repeated products can leave behind.
  return NonnegativeMatrix(acc.cwiseMax(0.0));
}

CovarianceFamily::CovarianceFamily(std::vector<SpdMatrix> mats) : mats_(std::move(mats)) {
  if (mats_.empty()) throw PreconditionError("CovarianceFamily: empty family");
  const Eigen::Index d = mats_.front().dim();
  for (const auto& p : mats_) {
    if (p.dim() != d) throw PreconditionError("CovarianceFamily: mixed dimensions");
  }
}

CovarianceFamily CovarianceFamily::constant(int count, const SpdMatrix& value) {
  if (count < 1) throw PreconditionError("CovarianceFamily: count must be >= 1");
  return CovarianceFamily(std::vector<SpdMatrix>(static_cast<size_t>(count), value));
}

CovarianceFamily CovarianceFamily::identity(int count, Eigen::Index dim) {
  return constant(count, SpdMatrix::identity(dim));
}

CovarianceFamily CovarianceFamily::scaled_identity(int count, Eigen::Index dim, double scale) {
  return constant(count, SpdMatrix::scaled_identity(dim, scale));
}

VectorXd CovarianceFamily::traces() const {
  VectorXd t(count());
  for (int i = 0; i < count(); ++i) t[i] = mats_[static_cast<size_t>(i)].trace();
  return t;
}

}  // namespace hcre
