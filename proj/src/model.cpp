#include "hcre/model.hpp"

#include "hcre/linalg.hpp"
#include "hcre/rng.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <sstream>

namespace hcre {

SystemModel::SystemModel(MatrixXd a, SpdMatrix q, std::vector<Sensor> sensors)
    : a_(std::move(a)), q_(std::move(q)), sensors_(std::move(sensors)) {
  const Eigen::Index n = a_.rows();
  if (a_.cols() != n || n == 0) throw PreconditionError("SystemModel: A must be square");
  if (q_.dim() != n) throw PreconditionError("SystemModel: Q dimension does not match A");
  if (sensors_.empty()) throw PreconditionError("SystemModel: need at least one sensor");

  obs_info_.reserve(sensors_.size());
  obs_gain_.reserve(sensors_.size());
  for (const auto& s : sensors_) {
    const Eigen::Index m = s.C.rows();
    if (m == 0) {
      obs_info_.push_back(MatrixXd::Zero(n, n));
      obs_gain_.push_back(MatrixXd::Zero(n, 0));
      continue;
    }
    if (s.C.cols() != n) throw PreconditionError("SystemModel: C_i column count must equal n");
    if (s.R.rows() != m || s.R.cols() != m) {
      throw PreconditionError("SystemModel: R_i must be m_i x m_i");
    }
    const SpdMatrix r(s.R);  // throws unless SPD
    obs_gain_.push_back(s.C.transpose() * r.inverse());
    obs_info_.push_back(symmetrized(obs_gain_.back() * s.C));
  }
}

std::vector<MatrixXd> SystemModel::c_blocks() const {
  std::vector<MatrixXd> out;
  out.reserve(sensors_.size());
  for (const auto& s : sensors_) out.push_back(s.C);
  return out;
}

Eigen::Index SystemModel::total_meas_dim() const {
  Eigen::Index total = 0;
  for (const auto& s : sensors_) total += s.meas_dim();
  return total;
}

bool Topology::strongly_connected() const {
  return is_strongly_connected(NonnegativeMatrix(adjacency.cast<double>()));
}

int Topology::diameter() const {
  int worst = 0;
  for (int s = 0; s < N; ++s) {
    std::vector<int> dist(static_cast<size_t>(N), -1);
    std::queue<int> q;
    dist[static_cast<size_t>(s)] = 0;
    q.push(s);
    while (!q.empty()) {
      const int u = q.front();
      q.pop();
      for (int v = 0; v < N; ++v) {
        if (v != u && adjacency(u, v) && dist[static_cast<size_t>(v)] < 0) {
          dist[static_cast<size_t>(v)] = dist[static_cast<size_t>(u)] + 1;
          q.push(v);
        }
      }
    }
    for (int v = 0; v < N; ++v) {
      if (dist[static_cast<size_t>(v)] < 0) {
        throw PreconditionError("Topology::diameter: graph is not connected");
      }
      worst = std::max(worst, dist[static_cast<size_t>(v)]);
    }
  }
  return worst;
}

int Topology::degree(int i) const {
  int d = 0;
  for (int j = 0; j < N; ++j)
    if (adjacency(i, j)) ++d;
  return d;
}

int Topology::max_degree_excl_self() const {
  int worst = 0;
  for (int i = 0; i < N; ++i) worst = std::max(worst, degree(i) - 1);
  return worst;
}

Topology topology_from_adjacency(const Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>& adj) {
  if (adj.rows() != adj.cols() || adj.rows() == 0) {
    throw PreconditionError("topology_from_adjacency: adjacency must be square and nonempty");
  }
  Topology t;
  t.N = static_cast<int>(adj.rows());
  t.adjacency = adj;
  for (int i = 0; i < t.N; ++i) t.adjacency(i, i) = true;
  return t;
}

Topology random_geometric_topology(int n_nodes, double width, double radius, std::uint64_t seed) {
  if (n_nodes < 1) throw PreconditionError("random_geometric_topology: need at least one node");
  if (radius <= 0.0) throw PreconditionError("random_geometric_topology: radius must be positive");

  for (int attempt = 0; attempt < 1000; ++attempt) {
    const std::uint64_t s = seed + static_cast<std::uint64_t>(attempt);
    CounterRng rng(s);
    std::vector<Eigen::Vector2d> pos(static_cast<size_t>(n_nodes));
    for (int i = 0; i < n_nodes; ++i) {
      pos[static_cast<size_t>(i)] = {rng.uniform(2 * static_cast<std::uint64_t>(i)) * width,
                                     rng.uniform(2 * static_cast<std::uint64_t>(i) + 1) * width};
    }
    Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> adj(n_nodes, n_nodes);
    for (int i = 0; i < n_nodes; ++i) {
      for (int j = 0; j < n_nodes; ++j) {
        adj(i, j) = (pos[static_cast<size_t>(i)] - pos[static_cast<size_t>(j)]).norm() <= radius;
      }
      adj(i, i) = true;
    }
    Topology t;
    t.N = n_nodes;
    t.adjacency = std::move(adj);
    t.positions = std::move(pos);
    t.seed_used = s;
    if (t.strongly_connected()) return t;
  }
  throw NumericalError("random_geometric_topology: radius too small for connectivity (1000 attempts)");
}

std::string variant_name(Variant v) {
  switch (v) {
    case Variant::Cidf: return "cidf";
    case Variant::Icf: return "icf";
    case Variant::Cmci: return "cmci";
    case Variant::Custom: return "custom";
  }
  return "unknown";
}

FusionWeights degree_normalized_weights(const Topology& topo) {
  MatrixXd l = MatrixXd::Zero(topo.N, topo.N);
  for (int i = 0; i < topo.N; ++i) {
    const double d = static_cast<double>(topo.degree(i));
    for (int j = 0; j < topo.N; ++j)
      if (topo.adjacency(i, j)) l(i, j) = 1.0 / d;
  }
  NonnegativeMatrix lm(l);
  return FusionWeights{lm, lm, Variant::Cidf, 1, std::nullopt, std::nullopt};
}

NonnegativeMatrix metropolis_weights(const Topology& topo) {
  MatrixXd w = MatrixXd::Zero(topo.N, topo.N);
  for (int i = 0; i < topo.N; ++i) {
    double off = 0.0;
    for (int j = 0; j < topo.N; ++j) {
      if (j != i && topo.adjacency(i, j)) {
        w(i, j) = 1.0 / (1.0 + std::max(topo.degree(i) - 1, topo.degree(j) - 1));
        off += w(i, j);
      }
    }
    w(i, i) = 1.0 - off;
  }
  return NonnegativeMatrix(w);
}

FusionWeights icf_weights(const Topology& topo, double epsilon, int depth) {
  if (depth < 1) throw PreconditionError("icf_weights: depth must be >= 1");
  const int dmax = topo.max_degree_excl_self();
  if (dmax > 0 && !(epsilon > 0.0 && epsilon < 1.0 / dmax)) {
    throw PreconditionError("icf_weights: epsilon outside (0, 1/max_degree), consensus matrix "
                            "would not be stochastic");
  }
  // W = I - epsilon * (D - A_off): row-stochastic with positive diagonal.
  MatrixXd w = MatrixXd::Identity(topo.N, topo.N);
  for (int i = 0; i < topo.N; ++i) {
    for (int j = 0; j < topo.N; ++j) {
      if (j != i && topo.adjacency(i, j)) {
        w(i, j) = epsilon;
        w(i, i) -= epsilon;
      }
    }
  }
  const NonnegativeMatrix wl = NonnegativeMatrix(w).power(depth);
  return FusionWeights{wl, NonnegativeMatrix(static_cast<double>(topo.N) * wl.mat()),
                       Variant::Icf, depth, std::nullopt, epsilon};
}

FusionWeights cmci_weights(const Topology& topo, const VectorXd& omega, int depth) {
  if (depth < 1) throw PreconditionError("cmci_weights: depth must be >= 1");
  if (omega.size() != topo.N) throw PreconditionError("cmci_weights: omega length must equal N");
  if ((omega.array() <= 0.0).any()) throw PreconditionError("cmci_weights: omega must be positive");
  const NonnegativeMatrix ll = degree_normalized_weights(topo).L_mat.power(depth);
  const MatrixXd nu = ll.mat() * omega.asDiagonal();  // nu_ij = l^(depth)_ij * omega_j
  return FusionWeights{ll, NonnegativeMatrix(nu), Variant::Cmci, depth, omega, std::nullopt};
}

FusionWeights weights_for(const Topology& topo, Variant variant, int depth,
                          std::optional<double> epsilon, std::optional<VectorXd> omega) {
  switch (variant) {
    case Variant::Cidf: {
      if (depth == 1) return degree_normalized_weights(topo);
      const NonnegativeMatrix ll = degree_normalized_weights(topo).L_mat.power(depth);
      return FusionWeights{ll, ll, Variant::Cidf, depth, std::nullopt, std::nullopt};
    }
    case Variant::Icf: {
      const int dmax = topo.max_degree_excl_self();
      const double eps = epsilon.value_or(dmax > 0 ? 0.65 / dmax : 0.5);
      return icf_weights(topo, eps, depth);
    }
    case Variant::Cmci: {
      const VectorXd w = omega.value_or(VectorXd::Ones(topo.N));
      return cmci_weights(topo, w, depth);
    }
    case Variant::Custom:
      break;
  }
  throw PreconditionError("weights_for: custom variant has no canonical construction");
}

bool ValidationReport::all_pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.pass; });
}

std::string ValidationReport::to_string() const {
  std::ostringstream os;
  for (const auto& c : checks) {
    os << (c.pass ? "pass" : "FAIL") << "  " << c.name << "  (" << c.measured << ")";
    if (!c.detail.empty()) os << "  " << c.detail;
    os << "\n";
  }
  return os.str();
}

ValidationReport validate(const SystemModel& model, const FusionWeights& weights) {
  ValidationReport report;
  {
    Eigen::JacobiSVD<MatrixXd> svd(model.A());
    const double smin = svd.singularValues().minCoeff();
    const double smax = svd.singularValues().maxCoeff();
    report.checks.push_back({"a_invertible", smin > 1e-12 * smax, smin, "min singular value"});
  }
  {
    const double lmin = min_eigenvalue(model.Q().mat());
    report.checks.push_back({"q_positive_definite", lmin > 0.0, lmin, "min eigenvalue"});
  }
  {
    double worst = std::numeric_limits<double>::infinity();
    bool ok = true;
    for (int i = 0; i < model.node_count(); ++i) {
      const auto& s = model.sensor(i);
      if (s.meas_dim() == 0) continue;
      const double lmin = min_eigenvalue(s.R);
      worst = std::min(worst, lmin);
      ok = ok && lmin > 0.0;
    }
    if (!std::isfinite(worst)) worst = 0.0;  // no measuring node at all
    report.checks.push_back({"r_positive_definite", ok, worst, "min eigenvalue over sensors"});
  }
  {
    const bool obs = is_collectively_observable(model.A(), model.c_blocks());
    report.checks.push_back({"collectively_observable", obs, obs ? 1.0 : 0.0, ""});
  }
  {
    const bool shape = weights.size() == model.node_count() &&
                       weights.nu_mat.size() == model.node_count();
    report.checks.push_back({"weight_shapes", shape, static_cast<double>(weights.size()),
                             "coupling matrix size vs node count"});
    if (!shape) return report;
  }
  {
    const double dev = (weights.L_mat.mat().rowwise().sum().array() - 1.0).abs().maxCoeff();
    report.checks.push_back({"l_row_stochastic", weights.L_mat.row_stochastic(), dev,
                             "max row-sum deviation"});
  }
  {
    const int expo = primitivity_exponent(weights.L_mat);
    report.checks.push_back({"l_primitive", expo > 0, static_cast<double>(expo),
                             "primitivity exponent"});
  }
  {
    const bool irr = is_irreducible(weights.nu_mat);
    report.checks.push_back({"nu_irreducible", irr, irr ? 1.0 : 0.0, ""});
  }
  return report;
}

}  // namespace hcre
