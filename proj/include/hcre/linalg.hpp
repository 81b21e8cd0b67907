// Dense matrix primitives: harmonic means of SPD matrices, primitivity and
// Perron analysis of nonnegative matrices, observability rank tests,
// spectral radii, and a discrete-time Lyapunov solver.
//
// Everything here is a pure function of its arguments and safe to call
// concurrently.
#pragma once

#include "hcre/types.hpp"

#include <vector>

namespace hcre {

/// Weighted harmonic mean (sum_j w_j P_j^{-1})^{-1}.
///
/// `weights` must be nonnegative with at least one positive entry.
/// Zero-weight entries contribute nothing; their slots in `mats` may be
/// null. The result is SPD whenever every participating matrix is.
SpdMatrix harmonic_mean(const VectorXd& weights, const std::vector<const SpdMatrix*>& mats);
SpdMatrix harmonic_mean(const VectorXd& weights, const std::vector<SpdMatrix>& mats);

/// True iff some power M^k, k <= (N-1)^2 + 1 (the Wielandt bound), is
/// entrywise positive. Works on the boolean sparsity pattern with
/// repeated squaring, so only the graph structure matters.
bool is_primitive(const NonnegativeMatrix& m);

/// Smallest k with M^k entrywise positive, or -1 if none exists within
/// the Wielandt bound. Exact but linear in k; meant for diagnostics.
int primitivity_exponent(const NonnegativeMatrix& m);

/// True iff every node can reach every other along directed edges
/// (nonzero entries) of m.
bool is_strongly_connected(const NonnegativeMatrix& m);
bool is_irreducible(const NonnegativeMatrix& m);

/// Left Perron vector q of a primitive row-stochastic matrix:
/// q^T M = q^T, q > 0, sum(q) = 1. Computed by left power iteration
/// until successive iterates differ by less than `tol` in max norm.
VectorXd perron_left_vector(const NonnegativeMatrix& m, double tol = 1e-12);

/// Rank test on the stacked observability matrix [C; CA; ...; CA^{n-1}]
/// where C stacks all blocks. Rank is counted from singular values with
/// threshold n * sigma_max * 1e-10. Blocks with zero rows are allowed.
bool is_collectively_observable(const MatrixXd& a, const std::vector<MatrixXd>& c_blocks);

/// max |lambda(M)|. Dense eigensolver up to `dense_cutoff`, power
/// iteration with a geometric-mean magnitude estimate beyond it.
double spectral_radius(const MatrixXd& m, Eigen::Index dense_cutoff = 2000, double tol = 1e-10);

/// Solve the discrete-time Lyapunov equation X = F X F^T + W for the
/// unique PSD X, by doubling accumulation
///   X_{k+1} = X_k + F_k X_k F_k^T,   F_{k+1} = F_k^2,
/// which converges geometrically and never forms the (dim^2)-sized
/// vectorized system. Requires rho(F) < 1; W symmetric PSD.
/// Terminates when ||X - F X F^T - W|| <= tol * ||W||.
MatrixXd solve_dle(const MatrixXd& f, const MatrixXd& w, double tol = 1e-10, int max_iter = 100);

/// Smallest eigenvalue of a symmetric matrix.
double min_eigenvalue(const MatrixXd& sym);

/// Loewner comparison with additive slack: x <= y + slack * I.
bool loewner_leq(const MatrixXd& x, const MatrixXd& y, double slack = 1e-10);

}  // namespace hcre
