// Steady-state estimation-error analysis: stacked closed-loop error
// operators at the fixed point, Schur/Lyapunov stability certificates,
// and the exact steady covariance from a discrete-time Lyapunov equation.
#pragma once

#include "hcre/model.hpp"
#include "hcre/solver.hpp"
#include "hcre/types.hpp"

namespace hcre {

/// Stacked operators of the steady error recursion
///   e_{k+1} = Acal e_k + Gamma v_k + (1 (x) I) w_k.
struct SteadyOperators {
  MatrixXd Acal;      // nN x nN, block (i,j) = l_ij A Pbar_i P_j^{-1}
  MatrixXd Gamma;     // nN x sum(m_j), block (i,j) = nu_ij A Pbar_i C_j^T R_j^{-1}
  MatrixXd R_blk;     // block diagonal of the R_j of measuring nodes
  MatrixXd Q_inject;  // (1 1^T) (x) Q, assembled blockwise
  int n = 0;
  int n_nodes = 0;
};

struct SteadyCovariance {
  MatrixXd Pcal;            // nN x nN PSD steady prediction-error covariance
  VectorXd per_node_trace;  // trace of each n x n diagonal block
  double network_mse = 0.0; // mean of per_node_trace
};

struct SchurCertificate {
  double rho = 0.0;          // spectral radius of Acal
  double beta = 0.0;         // smallest Lyapunov contraction factor for Q = diag(q_i P_i^{-1})
  bool lyapunov_ok = false;  // beta < 1
};

/// Fused posterior family Pbar_i = (sum_j nu_ij C_j^T R_j^{-1} C_j
/// + sum_j l_ij P_j^{-1})^{-1} at the fixed point. Checks the steady-state
/// identity A Pbar_i A^T = P_i - Q to 1e-8 relative and rejects inputs
/// that fail it.
CovarianceFamily fused_posterior(const CovarianceFamily& solution, const SystemModel& model,
                                 const FusionWeights& weights);

SteadyOperators build_error_operators(const CovarianceFamily& solution, const SystemModel& model,
                                      const FusionWeights& weights);

/// rho(Acal) plus the Perron-weighted Lyapunov factor: with q the left
/// Perron vector of L and Q = diag(q_i P_i^{-1}), beta is the largest
/// generalized eigenvalue of (Acal^T Q Acal, Q). beta < 1 certifies
/// Schur stability; beta >= rho^2 always.
SchurCertificate schur_certificate(const SteadyOperators& ops, const CovarianceFamily& solution,
                                   const FusionWeights& weights);

/// Solve Pcal = Acal Pcal Acal^T + Gamma R Gamma^T + (1 1^T) (x) Q.
SteadyCovariance steady_covariance(const SteadyOperators& ops, double tol = 1e-10);

}  // namespace hcre
