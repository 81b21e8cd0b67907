#include "hcre/steady.hpp"

#include "hcre/linalg.hpp"

#include <Eigen/Eigenvalues>

#include <string>
#include <vector>

namespace hcre {

CovarianceFamily fused_posterior(const CovarianceFamily& solution, const SystemModel& model,
                                 const FusionWeights& weights) {
  const int n_nodes = model.node_count();
  const Eigen::Index n = model.state_dim();

  std::vector<MatrixXd> pinv;
  pinv.reserve(static_cast<size_t>(n_nodes));
  for (int j = 0; j < n_nodes; ++j) pinv.push_back(solution[j].inverse());

  std::vector<SpdMatrix> pbar;
  pbar.reserve(static_cast<size_t>(n_nodes));
  for (int i = 0; i < n_nodes; ++i) {
    MatrixXd info = MatrixXd::Zero(n, n);
    for (int j = 0; j < n_nodes; ++j) {
      if (weights.L_mat(i, j) != 0.0) info += weights.L_mat(i, j) * pinv[static_cast<size_t>(j)];
      if (weights.nu_mat(i, j) != 0.0) info += weights.nu_mat(i, j) * model.obs_info(j);
    }
    pbar.emplace_back(SpdMatrix(info).inverse());

    // Steady-state identity A Pbar_i A^T = P_i - Q; failure flags an input
    // family that is not the fixed point.
    const MatrixXd lhs = model.A() * pbar.back().mat() * model.A().transpose();
    const MatrixXd rhs = solution[i].mat() - model.Q().mat();
    if ((lhs - rhs).norm() > 1e-8 * std::max(1.0, rhs.norm())) {
      throw PreconditionError("fused_posterior: steady-state identity violated at node " +
                              std::to_string(i + 1) + "; input is not a fixed point");
    }
  }
  return CovarianceFamily(std::move(pbar));
}

SteadyOperators build_error_operators(const CovarianceFamily& solution, const SystemModel& model,
                                      const FusionWeights& weights) {
  const int n_nodes = model.node_count();
  const Eigen::Index n = model.state_dim();
  const CovarianceFamily pbar = fused_posterior(solution, model, weights);

  SteadyOperators ops;
  ops.n = static_cast<int>(n);
  ops.n_nodes = n_nodes;
  ops.Acal = MatrixXd::Zero(n * n_nodes, n * n_nodes);
  const Eigen::Index m_total = model.total_meas_dim();
  ops.Gamma = MatrixXd::Zero(n * n_nodes, m_total);
  ops.R_blk = MatrixXd::Zero(m_total, m_total);
  ops.Q_inject = MatrixXd::Zero(n * n_nodes, n * n_nodes);

  std::vector<MatrixXd> a_pbar;  // A Pbar_i, reused across blocks
  std::vector<MatrixXd> pinv;
  a_pbar.reserve(static_cast<size_t>(n_nodes));
  pinv.reserve(static_cast<size_t>(n_nodes));
  for (int i = 0; i < n_nodes; ++i) {
    a_pbar.push_back(model.A() * pbar[i].mat());
    pinv.push_back(solution[i].inverse());
  }

  for (int i = 0; i < n_nodes; ++i) {
    for (int j = 0; j < n_nodes; ++j) {
      const double l = weights.L_mat(i, j);
      if (l != 0.0) {
        ops.Acal.block(i * n, j * n, n, n) =
            l * a_pbar[static_cast<size_t>(i)] * pinv[static_cast<size_t>(j)];
      }
      ops.Q_inject.block(i * n, j * n, n, n) = model.Q().mat();
    }
  }

  Eigen::Index col = 0;
  for (int j = 0; j < n_nodes; ++j) {
    const Eigen::Index m = model.sensor(j).meas_dim();
    if (m == 0) continue;
    for (int i = 0; i < n_nodes; ++i) {
      const double nu = weights.nu_mat(i, j);
      if (nu != 0.0) {
        ops.Gamma.block(i * n, col, n, m) = nu * a_pbar[static_cast<size_t>(i)] * model.obs_gain(j);
      }
    }
    ops.R_blk.block(col, col, m, m) = model.sensor(j).R;
    col += m;
  }
  return ops;
}

SchurCertificate schur_certificate(const SteadyOperators& ops, const CovarianceFamily& solution,
                                   const FusionWeights& weights) {
  const int n_nodes = ops.n_nodes;
  const Eigen::Index n = ops.n;

  SchurCertificate cert;
  cert.rho = spectral_radius(ops.Acal);

  const VectorXd q = perron_left_vector(weights.L_mat);
  MatrixXd qcal = MatrixXd::Zero(n * n_nodes, n * n_nodes);
  for (int i = 0; i < n_nodes; ++i) {
    qcal.block(i * n, i * n, n, n) = q[i] * solution[i].inverse();
  }

  // Smallest beta with Acal^T Qcal Acal <= beta Qcal, via the generalized
  // symmetric eigenproblem reduced by the Cholesky factor of Qcal.
  const SpdMatrix qspd(qcal);
  const MatrixXd lfac = qspd.cholesky_factor();
  const MatrixXd mid = symmetrized(ops.Acal.transpose() * qcal * ops.Acal);
  const MatrixXd reduced = lfac.triangularView<Eigen::Lower>().solve(
      lfac.triangularView<Eigen::Lower>().solve(mid).transpose());
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(symmetrized(reduced), Eigen::EigenvaluesOnly);
  cert.beta = es.eigenvalues().maxCoeff();
  cert.lyapunov_ok = cert.beta < 1.0;
  return cert;
}

SteadyCovariance steady_covariance(const SteadyOperators& ops, double tol) {
  const MatrixXd w = symmetrized(ops.Gamma * ops.R_blk * ops.Gamma.transpose() + ops.Q_inject);
  SteadyCovariance out;
  out.Pcal = solve_dle(ops.Acal, w, tol);
  out.per_node_trace.resize(ops.n_nodes);
  for (int i = 0; i < ops.n_nodes; ++i) {
    out.per_node_trace[i] = out.Pcal.block(i * ops.n, i * ops.n, ops.n, ops.n).trace();
  }
  out.network_mse = out.per_node_trace.mean();
  return out;
}

}  // namespace hcre
