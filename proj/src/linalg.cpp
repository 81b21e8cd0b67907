#include "hcre/linalg.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <cstdint>
#include <string>

namespace hcre {

namespace {

// Boolean row-bitmask representation of a sparsity pattern; rows are
// packed into 64-bit blocks so pattern products are cheap OR loops.
struct BitPattern {
  int n;
  int blocks;
  std::vector<std::uint64_t> rows;  // n * blocks

  explicit BitPattern(const MatrixXd& m)
      : n(static_cast<int>(m.rows())), blocks((n + 63) / 64), rows(static_cast<size_t>(n) * blocks, 0) {
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (m(i, j) > 0.0) set(i, j);
  }

  BitPattern(int n_, int blocks_) : n(n_), blocks(blocks_), rows(static_cast<size_t>(n_) * blocks_, 0) {}

  void set(int i, int j) { rows[static_cast<size_t>(i) * blocks + j / 64] |= (1ull << (j % 64)); }
  bool get(int i, int j) const { return rows[static_cast<size_t>(i) * blocks + j / 64] >> (j % 64) & 1; }

  bool all_set() const {
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (!get(i, j)) return false;
    return true;
  }

  // Pattern of a*b: row i of result = OR of rows j of b over set bits j of row i of a.
  static BitPattern multiply(const BitPattern& a, const BitPattern& b) {
    BitPattern out(a.n, a.blocks);
    for (int i = 0; i < a.n; ++i) {
      std::uint64_t* dst = &out.rows[static_cast<size_t>(i) * out.blocks];
      for (int j = 0; j < a.n; ++j) {
        if (a.get(i, j)) {
          const std::uint64_t* src = &b.rows[static_cast<size_t>(j) * b.blocks];
          for (int c = 0; c < a.blocks; ++c) dst[c] |= src[c];
        }
      }
    }
    return out;
  }
};

}  // namespace

SpdMatrix harmonic_mean(const VectorXd& weights, const std::vector<const SpdMatrix*>& mats) {
  if (weights.size() != static_cast<Eigen::Index>(mats.size())) {
    throw PreconditionError("harmonic_mean: weights/matrix count mismatch");
  }
  if ((weights.array() < 0.0).any()) throw PreconditionError("harmonic_mean: negative weight");
  if (weights.maxCoeff() <= 0.0) throw PreconditionError("harmonic_mean: all weights are zero");

  Eigen::Index dim = -1;
  for (Eigen::Index j = 0; j < weights.size(); ++j) {
    if (weights[j] == 0.0) continue;
    if (mats[static_cast<size_t>(j)] == nullptr) {
      throw PreconditionError("harmonic_mean: missing matrix for positive weight");
    }
    const Eigen::Index d = mats[static_cast<size_t>(j)]->dim();
    if (dim == -1) dim = d;
    if (d != dim) throw PreconditionError("harmonic_mean: dimension mismatch");
  }

  MatrixXd info = MatrixXd::Zero(dim, dim);
  for (Eigen::Index j = 0; j < weights.size(); ++j) {
    if (weights[j] == 0.0) continue;
    info += weights[j] * mats[static_cast<size_t>(j)]->inverse();
  }
  return SpdMatrix(SpdMatrix(info).inverse());
}

SpdMatrix harmonic_mean(const VectorXd& weights, const std::vector<SpdMatrix>& mats) {
  std::vector<const SpdMatrix*> ptrs;
  ptrs.reserve(mats.size());
  for (const auto& m : mats) ptrs.push_back(&m);
  return harmonic_mean(weights, ptrs);
}

bool is_primitive(const NonnegativeMatrix& m) {
  const int n = static_cast<int>(m.size());
  const long bound = static_cast<long>(n - 1) * (n - 1) + 1;  // Wielandt
  BitPattern p(m.mat());
  long k = 1;
  while (true) {
    if (p.all_set()) return true;
    if (k >= bound) return false;
    p = BitPattern::multiply(p, p);  // pattern of M^(2k)
    k *= 2;
  }
}

int primitivity_exponent(const NonnegativeMatrix& m) {
  const int n = static_cast<int>(m.size());
  const long bound = static_cast<long>(n - 1) * (n - 1) + 1;
  const BitPattern base(m.mat());
  BitPattern p = base;
  for (long k = 1; k <= bound; ++k) {
    if (p.all_set()) return static_cast<int>(k);
    p = BitPattern::multiply(p, base);
  }
  return -1;
}

bool is_strongly_connected(const NonnegativeMatrix& m) {
  const int n = static_cast<int>(m.size());
  const auto reach_all = [n](const MatrixXd& mat, bool transpose) {
    std::vector<char> seen(static_cast<size_t>(n), 0);
    std::vector<int> stack{0};
    seen[0] = 1;
    int count = 1;
    while (!stack.empty()) {
      const int u = stack.back();
      stack.pop_back();
      for (int v = 0; v < n; ++v) {
        const double e = transpose ? mat(v, u) : mat(u, v);
        if (e > 0.0 && !seen[static_cast<size_t>(v)]) {
          seen[static_cast<size_t>(v)] = 1;
          ++count;
          stack.push_back(v);
        }
      }
    }
    return count == n;
  };
  return reach_all(m.mat(), false) && reach_all(m.mat(), true);
}

bool is_irreducible(const NonnegativeMatrix& m) { return is_strongly_connected(m); }

VectorXd perron_left_vector(const NonnegativeMatrix& m, double tol) {
  if (!m.row_stochastic()) {
    throw PreconditionError("perron_left_vector: matrix is not row stochastic");
  }
  if (!is_primitive(m)) {
    throw PreconditionError("perron_left_vector: matrix is not primitive");
  }
  const Eigen::Index n = m.size();
  VectorXd q = VectorXd::Constant(n, 1.0 / static_cast<double>(n));
  // Power iteration converges geometrically at the second-eigenvalue rate
  // for primitive stochastic matrices.
  const long max_iter = 1000000;
  for (long it = 0; it < max_iter; ++it) {
    VectorXd next = m.mat().transpose() * q;
    next /= next.sum();
    const double delta = (next - q).cwiseAbs().maxCoeff();
    q = next;
    if (delta < tol) {
      if (q.minCoeff() <= 0.0) {
        throw NumericalError("perron_left_vector: non-positive entry in limit vector");
      }
      return q;
    }
  }
  throw NumericalError("perron_left_vector: power iteration did not converge");
}

bool is_collectively_observable(const MatrixXd& a, const std::vector<MatrixXd>& c_blocks) {
  const Eigen::Index n = a.rows();
  if (a.cols() != n) throw PreconditionError("is_collectively_observable: A must be square");
  Eigen::Index total_rows = 0;
  for (const auto& c : c_blocks) {
    if (c.rows() > 0 && c.cols() != n) {
      throw PreconditionError("is_collectively_observable: C block column mismatch");
    }
    total_rows += c.rows();
  }
  if (total_rows == 0) return false;

  MatrixXd stacked(total_rows, n);
  Eigen::Index r = 0;
  for (const auto& c : c_blocks) {
    if (c.rows() == 0) continue;
    stacked.middleRows(r, c.rows()) = c;
    r += c.rows();
  }

  MatrixXd obs(total_rows * n, n);
  MatrixXd block = stacked;
  for (Eigen::Index k = 0; k < n; ++k) {
    obs.middleRows(k * total_rows, total_rows) = block;
    block = block * a;
  }
  Eigen::JacobiSVD<MatrixXd> svd(obs);
  const auto& sv = svd.singularValues();
  const double thresh = static_cast<double>(n) * sv(0) * 1e-10;
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > thresh) ++rank;
  return rank == n;
}

double spectral_radius(const MatrixXd& m, Eigen::Index dense_cutoff, double tol) {
  if (m.rows() != m.cols()) throw PreconditionError("spectral_radius: matrix must be square");
  if (m.rows() == 0) return 0.0;
  if (m.rows() <= dense_cutoff) {
    Eigen::EigenSolver<MatrixXd> es(m, /*computeEigenvectors=*/false);
    return es.eigenvalues().cwiseAbs().maxCoeff();
  }
  // Power iteration; |lambda_max| is recovered from the geometric mean of
  // norm growth so complex-conjugate dominant pairs do not oscillate it.
  VectorXd v = VectorXd::Ones(m.rows()).normalized();
  double log_growth = 0.0;
  double prev_estimate = -1.0;
  const int max_iter = 100000;
  for (int k = 1; k <= max_iter; ++k) {
    VectorXd w = m * v;
    const double norm = w.norm();
    if (norm == 0.0) return 0.0;
    log_growth += std::log(norm);
    v = w / norm;
    const double estimate = std::exp(log_growth / k);
    if (k > 10 && std::abs(estimate - prev_estimate) <= tol * std::max(1.0, estimate)) {
      return estimate;
    }
    prev_estimate = estimate;
  }
  return prev_estimate;
}

MatrixXd solve_dle(const MatrixXd& f, const MatrixXd& w, double tol, int max_iter) {
  if (f.rows() != f.cols()) throw PreconditionError("solve_dle: F must be square");
  if (w.rows() != f.rows() || w.cols() != f.cols()) {
    throw PreconditionError("solve_dle: W shape does not match F");
  }
  const double rho = spectral_radius(f);
  if (rho >= 1.0) {
    throw NumericalError("solve_dle: unstable, spectral radius " + std::to_string(rho) + " >= 1");
  }
  const double w_norm = symmetrized(w).norm();
  if (w_norm == 0.0) return MatrixXd::Zero(w.rows(), w.cols());

  MatrixXd x = symmetrized(w);
  MatrixXd fk = f;
  for (int k = 0; k < max_iter; ++k) {
    const MatrixXd inc = fk * x * fk.transpose();
    x = symmetrized(x + inc);
    // Residual of the accumulated sum is exactly the next increment term.
    if (inc.norm() <= tol * w_norm) return x;
    fk = fk * fk;
  }
  throw NumericalError("solve_dle: no convergence within max_iter doublings");
}

double min_eigenvalue(const MatrixXd& sym) {
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(symmetrized(sym), Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

bool loewner_leq(const MatrixXd& x, const MatrixXd& y, double slack) {
  return min_eigenvalue(y - x) >= -slack;
}

}  // namespace hcre
