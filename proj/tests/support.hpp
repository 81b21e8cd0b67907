// Shared test helpers: seeded random problem generators and the
// independent oracles the implementation is checked against. Everything
// here is deliberately written from scratch against textbook formulas,
// not by calling the library's own code paths.
#pragma once

#include "hcre/model.hpp"
#include "hcre/types.hpp"

#include <Eigen/Dense>

#include <random>
#include <vector>

namespace hcre::test {

using Eigen::MatrixXd;
using Eigen::VectorXd;

inline MatrixXd random_matrix(std::mt19937_64& rng, int rows, int cols, double scale = 1.0) {
  std::uniform_real_distribution<double> u(-scale, scale);
  MatrixXd m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = u(rng);
  return m;
}

inline SpdMatrix random_spd(std::mt19937_64& rng, int n, double ridge = 0.5) {
  const MatrixXd b = random_matrix(rng, n, n);
  return SpdMatrix(b * b.transpose() + ridge * MatrixXd::Identity(n, n));
}

// PSD increment for Loewner-monotonicity tests.
inline MatrixXd random_psd(std::mt19937_64& rng, int n, double scale = 1.0) {
  const MatrixXd b = random_matrix(rng, n, n, scale);
  return b * b.transpose();
}

// Three-node chain 1-2-3 with self-loops.
inline Topology path3_topology() {
  Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> adj(3, 3);
  adj.setConstant(false);
  adj(0, 1) = adj(1, 0) = adj(1, 2) = adj(2, 1) = true;
  return topology_from_adjacency(adj);
}

// Random connected topology with self-loops on N nodes.
inline Topology random_topology(std::mt19937_64& rng, int n_nodes) {
  std::bernoulli_distribution edge(0.5);
  Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> adj(n_nodes, n_nodes);
  adj.setConstant(false);
  for (int i = 0; i < n_nodes; ++i) {
    adj(i, i) = true;
    for (int j = i + 1; j < n_nodes; ++j) adj(i, j) = adj(j, i) = edge(rng);
  }
  for (int i = 0; i + 1 < n_nodes; ++i) adj(i, i + 1) = adj(i + 1, i) = true;  // ensure a spine
  return topology_from_adjacency(adj);
}

struct RandomSystem {
  SystemModel model;
  Topology topo;
  FusionWeights weights;
};

// Seeded random validated system: n <= 4 states, N <= 6 nodes, invertible
// A, SPD noise, at least one measuring node, collectively observable.
inline RandomSystem make_random_system(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> nd(1, 4), capn(1, 6);
  const int n = nd(rng);
  const int n_nodes = capn(rng);

  MatrixXd a;
  for (;;) {
    a = random_matrix(rng, n, n);
    Eigen::JacobiSVD<MatrixXd> svd(a);
    if (svd.singularValues().minCoeff() > 1e-3 * svd.singularValues().maxCoeff()) break;
  }

  std::bernoulli_distribution measuring(0.6);
  std::uniform_real_distribution<double> rpos(0.2, 2.0);
  for (;;) {
    std::vector<Sensor> sensors;
    std::vector<MatrixXd> c_blocks;
    for (int i = 0; i < n_nodes; ++i) {
      if (i == 0 || measuring(rng)) {
        Sensor s;
        s.C = random_matrix(rng, 1, n);
        s.R = rpos(rng) * MatrixXd::Identity(1, 1);
        c_blocks.push_back(s.C);
        sensors.push_back(std::move(s));
      } else {
        sensors.push_back(Sensor{MatrixXd::Zero(0, n), MatrixXd()});
        c_blocks.push_back(MatrixXd::Zero(0, n));
      }
    }
    if (!is_collectively_observable(a, c_blocks)) continue;
    SystemModel model(a, random_spd(rng, n), std::move(sensors));
    Topology topo = random_topology(rng, n_nodes);
    FusionWeights weights = degree_normalized_weights(topo);
    return RandomSystem{std::move(model), std::move(topo), std::move(weights)};
  }
}

// ----------------------------------------------------------------------
// Oracles
// ----------------------------------------------------------------------

// Classical gain-form Kalman cycle: correct with y, then predict.
struct KalmanOracle {
  MatrixXd a, c, q, r;
  VectorXd x;
  MatrixXd p;

  void step(const VectorXd& y) {
    const MatrixXd s = c * p * c.transpose() + r;
    const MatrixXd k = p * c.transpose() * s.inverse();
    x = x + k * (y - c * x);
    p = p - k * c * p;
    x = a * x;
    p = a * p * a.transpose() + q;
  }
};

// Direct vectorized Lyapunov solve: vec(X) = (I - F (x) F)^{-1} vec(W).
inline MatrixXd dle_kron_oracle(const MatrixXd& f, const MatrixXd& w) {
  const Eigen::Index n = f.rows();
  MatrixXd kron(n * n, n * n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      kron.block(i * n, j * n, n, n) = f(i, j) * f;
  const MatrixXd lhs = MatrixXd::Identity(n * n, n * n) - kron;
  const VectorXd vec_w = Eigen::Map<const VectorXd>(w.data(), n * n);
  const VectorXd vec_x = lhs.fullPivLu().solve(vec_w);
  return Eigen::Map<const MatrixXd>(vec_x.data(), n, n);
}

// Root of the single-node scalar fixed-point equation
//   p = a^2 / (1/p + info) + q
// by bisection on [q, hi] to 1e-12.
inline double scalar_riccati_bisection(double a, double info, double q) {
  auto g = [&](double p) { return a * a / (1.0 / p + info) + q - p; };
  double lo = q, hi = q + 1.0;
  while (g(hi) > 0.0) hi *= 2.0;
  for (int it = 0; it < 200 && hi - lo > 1e-12; ++it) {
    const double mid = 0.5 * (lo + hi);
    (g(mid) > 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace hcre::test
