// The objects the filtering theory quantifies over: an LTI plant with a
// sensor suite, communication topologies, and the coupling-weight pairs
// used by the consensus filtering variants.
#pragma once

#include "hcre/types.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace hcre {

/// One sensing node. `C` may have zero rows (a node that relays but does
/// not measure); then `R` is empty and the node contributes zero
/// observation information.
struct Sensor {
  MatrixXd C;  // m_i x n
  MatrixXd R;  // m_i x m_i, SPD when m_i > 0

  Eigen::Index meas_dim() const { return C.rows(); }
};

/// Linear time-invariant plant x' = A x + w observed by N sensors
/// y_i = C_i x + v_i. Construction checks shapes and noise positive
/// definiteness; invertibility of A and collective observability are
/// reported by validate() so that defective models can be diagnosed.
class SystemModel {
 public:
  SystemModel(MatrixXd a, SpdMatrix q, std::vector<Sensor> sensors);

  int state_dim() const { return static_cast<int>(a_.rows()); }
  int node_count() const { return static_cast<int>(sensors_.size()); }
  const MatrixXd& A() const { return a_; }
  const SpdMatrix& Q() const { return q_; }
  const Sensor& sensor(int i) const { return sensors_.at(static_cast<size_t>(i)); }
  const std::vector<Sensor>& sensors() const { return sensors_; }

  /// C_i^T R_i^{-1} C_i (n x n, zero for non-measuring nodes).
  const MatrixXd& obs_info(int i) const { return obs_info_.at(static_cast<size_t>(i)); }
  /// C_i^T R_i^{-1} (n x m_i, empty for non-measuring nodes).
  const MatrixXd& obs_gain(int i) const { return obs_gain_.at(static_cast<size_t>(i)); }

  std::vector<MatrixXd> c_blocks() const;
  Eigen::Index total_meas_dim() const;

 private:
  MatrixXd a_;
  SpdMatrix q_;
  std::vector<Sensor> sensors_;
  std::vector<MatrixXd> obs_info_;
  std::vector<MatrixXd> obs_gain_;
};

/// Communication graph over N nodes. Adjacency always carries self-loops
/// on the diagonal; geometric constructions produce symmetric adjacency.
struct Topology {
  int N = 0;
  Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> adjacency;
  std::optional<std::vector<Eigen::Vector2d>> positions;
  std::uint64_t seed_used = 0;  // seed that produced a connected layout

  bool strongly_connected() const;
  /// Longest shortest-path length between any two nodes (self-loops ignored).
  int diameter() const;
  /// Neighbor count of node i, self-loop included.
  int degree(int i) const;
  /// Largest neighbor count excluding the self-loop.
  int max_degree_excl_self() const;
};

Topology topology_from_adjacency(const Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>& adj);

/// Drop N nodes uniformly on a [0,width]^2 region and connect pairs within
/// `radius`. Regenerates with incremented seed until the graph is
/// connected (at most 1000 attempts); the successful seed is recorded in
/// the result so layouts are reproducible bit for bit.
Topology random_geometric_topology(int n_nodes, double width, double radius, std::uint64_t seed);

enum class Variant { Cidf, Icf, Cmci, Custom };

std::string variant_name(Variant v);

/// The pair of coupling matrices entering the unified fusion iteration:
/// `L_mat` weights neighbor covariance information, `nu_mat` weights
/// neighbor observation information. All classical consensus filter
/// variants reduce to a choice of this pair.
struct FusionWeights {
  NonnegativeMatrix L_mat;
  NonnegativeMatrix nu_mat;
  Variant variant = Variant::Custom;
  int fusion_depth = 1;
  std::optional<VectorXd> omega;    // per-node observation weights (hybrid variant)
  std::optional<double> epsilon;    // consensus step size (information-weighted variant)

  Eigen::Index size() const { return L_mat.size(); }
};

/// l_ij = a_ij / d_ii with d_ii the self-loop-inclusive degree; pairs the
/// matrix with itself (the plain consensus-on-information filter).
FusionWeights degree_normalized_weights(const Topology& topo);

/// Doubly stochastic Metropolis weights for a symmetric topology.
NonnegativeMatrix metropolis_weights(const Topology& topo);

/// Information-weighted consensus: consensus matrix W = I - epsilon * Lap
/// (Lap the graph Laplacian of the off-diagonal adjacency), L_mat = W^depth,
/// nu_mat = N * W^depth. Requires 0 < epsilon < 1/max_degree.
FusionWeights icf_weights(const Topology& topo, double epsilon, int depth);

/// Hybrid consensus with per-node observation weights omega:
/// L_mat = (degree-normalized L)^depth, nu_ij = l^(depth)_ij * omega_j.
FusionWeights cmci_weights(const Topology& topo, const VectorXd& omega, int depth);

/// Variant weights at a given fusion depth on a topology; for the plain
/// variant this is the depth-th power of the degree-normalized matrix
/// paired with itself.
FusionWeights weights_for(const Topology& topo, Variant variant, int depth,
                          std::optional<double> epsilon = std::nullopt,
                          std::optional<VectorXd> omega = std::nullopt);

struct ValidationCheck {
  std::string name;
  bool pass = false;
  double measured = 0.0;  // check-specific diagnostic quantity
  std::string detail;
};

struct ValidationReport {
  std::vector<ValidationCheck> checks;
  bool all_pass() const;
  std::string to_string() const;
};

/// Report-style verification of the standing assumptions: A invertible,
/// noise covariances positive definite, collective observability,
/// L primitive and row stochastic, nu irreducible.
ValidationReport validate(const SystemModel& model, const FusionWeights& weights);

}  // namespace hcre
