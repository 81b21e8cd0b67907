// Deep-fusion limits: Perron limit rows of the coupling matrices, the
// collapsed single-node Riccati iteration they induce, and the
// centralized benchmark that information-weighted consensus approaches.
#pragma once

#include "hcre/model.hpp"
#include "hcre/types.hpp"

#include <optional>
#include <vector>

namespace hcre {

/// Limit rows of L^k and nu^k for primitive row-stochastic inputs.
struct LimitWeights {
  VectorXd mu2;  // limit row of L^k
  VectorXd mu4;  // limit row of nu^k
};

LimitWeights limit_weights(const FusionWeights& weights);

/// Fixed point of the single Riccati map with pooled observation
/// information sum_j mu4_j C_j^T R_j^{-1} C_j:
///   P' = A (P^{-1} + I_total)^{-1} A^T + Q.
/// The pooled pair (A, I_total) must be detectable, which is checked by
/// an observability rank test on a square root of I_total.
SpdMatrix asymptotic_fixed_point(const SystemModel& model, const VectorXd& mu4,
                                 double tol = 1e-12, int max_iter = 100000);

/// Fixed point with the full pooled information sum_j C_j^T R_j^{-1} C_j
/// (the centralized optimum).
SpdMatrix centralized_riccati(const SystemModel& model, double tol = 1e-12,
                              int max_iter = 100000);

struct DepthSweepRow {
  int depth = 0;
  VectorXd node_traces;
};

struct DepthSweepResult {
  std::vector<DepthSweepRow> rows;
  double centralized_trace = 0.0;
  double asymptotic_trace = 0.0;
  /// True when the plain-variant comparison substituted doubly stochastic
  /// Metropolis weights for a topology whose degree-normalized weights are
  /// not doubly stochastic (the deep-fusion limit is only meaningful for
  /// doubly stochastic coupling there).
  bool metropolis_substituted = false;
  Variant variant = Variant::Cidf;
};

/// Solve the coupled fixed point at each fusion depth and record per-node
/// traces next to the centralized and deep-fusion reference values.
DepthSweepResult fusion_depth_sweep(const SystemModel& model, const Topology& topo,
                                    Variant variant, const std::vector<int>& depths,
                                    double tol = 1e-10,
                                    std::optional<double> epsilon = std::nullopt,
                                    std::optional<VectorXd> omega = std::nullopt);

}  // namespace hcre
