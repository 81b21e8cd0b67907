// Trajectory simulation and the consensus information filter itself:
// prediction, correction and covariance-intersection fusion executed in
// information form over simulated measurement streams.
#pragma once

#include "hcre/model.hpp"
#include "hcre/rng.hpp"
#include "hcre/types.hpp"

#include <cstdint>
#include <vector>

namespace hcre {

/// Simulated plant run. Noise draws come from CounterRng with a fixed
/// order per step k: first the n process-noise normals (used to advance
/// x_k to x_{k+1}), then each sensor's m_i measurement normals in node
/// order. The last step's process draws are made like any other, which
/// keeps the per-step counter layout uniform.
struct Trajectory {
  MatrixXd states;                      // horizon x n, row k = x_k
  std::vector<MatrixXd> measurements;   // per node: horizon x m_i, row k = y_{i,k}
  std::uint64_t seed = 0;
  double noise_scale = 1.0;

  int horizon() const { return static_cast<int>(states.rows()); }
};

Trajectory simulate_plant(const SystemModel& model, int horizon, const VectorXd& x0,
                          std::uint64_t seed, double noise_scale = 1.0);

/// Per-node a-priori estimate/covariance pairs at step k.
struct FilterBank {
  std::vector<VectorXd> xhat;
  CovarianceFamily covs;
  int step_index = 0;
};

/// xhat = 0, P = I for every node.
FilterBank default_bank(const SystemModel& model);

/// Covariance side of the filter, which never depends on data: per step,
/// the prior information matrices P_{j,k}^{-1} and fused posteriors
/// Pbar_{i,k}. Shared across Monte Carlo trials.
struct CovariancePath {
  std::vector<std::vector<MatrixXd>> prior_info;  // [k][j] = P_{j,k}^{-1}
  std::vector<std::vector<MatrixXd>> posterior;   // [k][i] = Pbar_{i,k}

  int horizon() const { return static_cast<int>(prior_info.size()); }
};

CovariancePath build_covariance_path(const SystemModel& model, const FusionWeights& weights,
                                     const CovarianceFamily& init, int horizon);

/// One filter cycle in information form: each node's prior pair is
/// corrected by nu-weighted observation information, fused with the
/// l-weighted neighbor information, and propagated through the plant.
/// Numerically equal to the gain-form predict/correct/fuse cycle.
FilterBank cidf_step(const FilterBank& bank, const std::vector<VectorXd>& measurements,
                     const SystemModel& model, const FusionWeights& weights);

struct FilterRun {
  std::vector<MatrixXd> errors;  // per node: horizon x n, row k = x_k - xhat_{i,k}
  FilterBank final_bank;
};

/// Run the filter over a trajectory, recording a-priori errors at every
/// step. The covariance path may be precomputed and shared.
FilterRun run_filter(const SystemModel& model, const FusionWeights& weights,
                     const Trajectory& traj, const FilterBank& bank0);
FilterRun run_filter(const SystemModel& model, const FusionWeights& weights,
                     const Trajectory& traj, const FilterBank& bank0,
                     const CovariancePath& path);

/// Accumulate per-node squared a-priori errors into `sq` (N x horizon)
/// without materializing error series; the fast path for Monte Carlo.
void accumulate_squared_errors(const SystemModel& model, const FusionWeights& weights,
                               const Trajectory& traj, const std::vector<VectorXd>& xhat0,
                               const CovariancePath& path, MatrixXd& sq);

}  // namespace hcre
