#include "hcre/solver.hpp"

#include "hcre/linalg.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <string>
#include <utility>

namespace hcre {

namespace {

double sym_spectral_norm(const MatrixXd& sym) {
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(sym, Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

void check_compatible(const CovarianceFamily& family, const SystemModel& model,
                      const FusionWeights& weights) {
  if (family.count() != model.node_count() || weights.size() != model.node_count()) {
    throw PreconditionError("hcre: family/model/weights node counts disagree");
  }
  if (family.dim() != model.state_dim()) {
    throw PreconditionError("hcre: family dimension does not match the state dimension");
  }
}

// Information sum sum_j l_ij P_j^{-1} + nu_ij C_j^T R_j^{-1} C_j for one node.
MatrixXd node_information(int i, const std::vector<MatrixXd>& pinv, const SystemModel& model,
                          const FusionWeights& weights) {
  const Eigen::Index n = model.state_dim();
  MatrixXd info = MatrixXd::Zero(n, n);
  for (int j = 0; j < model.node_count(); ++j) {
    const double l = weights.L_mat(i, j);
    if (l != 0.0) info += l * pinv[static_cast<size_t>(j)];
    const double nu = weights.nu_mat(i, j);
    if (nu != 0.0 && model.sensor(j).meas_dim() > 0) info += nu * model.obs_info(j);
  }
  return info;
}

double step_residual(const CovarianceFamily& prev, const CovarianceFamily& next) {
  double worst = 0.0;
  for (int i = 0; i < prev.count(); ++i) {
    const double num = sym_spectral_norm(next[i].mat() - prev[i].mat());
    const double den = sym_spectral_norm(prev[i].mat());
    worst = std::max(worst, num / den);
  }
  return worst;
}

struct IterationTrace {
  std::vector<VectorXd> rows;

  void push(const CovarianceFamily& family) { rows.push_back(family.traces()); }

  MatrixXd matrix() const {
    MatrixXd out(rows.size(), rows.empty() ? 0 : rows.front().size());
    for (size_t k = 0; k < rows.size(); ++k) out.row(static_cast<Eigen::Index>(k)) = rows[k];
    return out;
  }
};

MatrixXd kron(const MatrixXd& a, const MatrixXd& b) {
  MatrixXd out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

}  // namespace

CovarianceFamily make_init(const SystemModel& model, int n_nodes, const InitSpec& spec) {
  switch (spec.kind) {
    case InitSpec::Kind::Identity:
      return CovarianceFamily::identity(n_nodes, model.state_dim());
    case InitSpec::Kind::QInit:
      return CovarianceFamily::constant(n_nodes, model.Q());
    case InitSpec::Kind::Scaled:
      return CovarianceFamily::scaled_identity(n_nodes, model.state_dim(), spec.scale);
  }
  throw PreconditionError("make_init: unknown preset");
}

CovarianceFamily hcre_step(const CovarianceFamily& family, const SystemModel& model,
                           const FusionWeights& weights) {
  check_compatible(family, model, weights);
  const int n_nodes = model.node_count();

  std::vector<MatrixXd> pinv;
  pinv.reserve(static_cast<size_t>(n_nodes));
  for (int j = 0; j < n_nodes; ++j) pinv.push_back(family[j].inverse());

  std::vector<SpdMatrix> out;
  out.reserve(static_cast<size_t>(n_nodes));
  for (int i = 0; i < n_nodes; ++i) {
    const SpdMatrix fused_info(node_information(i, pinv, model, weights));
    out.emplace_back(model.A() * fused_info.inverse() * model.A().transpose() + model.Q().mat());
  }
  return CovarianceFamily(std::move(out));
}

std::pair<CovarianceFamily, SolveReport> solve_fixed_point(const SystemModel& model,
                                                           const FusionWeights& weights,
                                                           const CovarianceFamily& init,
                                                           double tol, int max_iter) {
  if (tol <= 0.0) throw PreconditionError("solve_fixed_point: tol must be positive");
  check_compatible(init, model, weights);

  SolveReport report;
  report.tolerance = tol;
  IterationTrace trace;
  trace.push(init);

  CovarianceFamily current = init;
  for (int k = 0; k < max_iter; ++k) {
    CovarianceFamily next = hcre_step(current, model, weights);
    report.residual = step_residual(current, next);
    report.iterations = k + 1;
    current = std::move(next);
    trace.push(current);
    if (report.residual <= tol) {
      report.converged = true;
      break;
    }
  }
  report.trace_history = trace.matrix();
  return {current, report};
}

std::pair<CovarianceFamily, SolveReport> solve_fixed_point(const SystemModel& model,
                                                           const FusionWeights& weights,
                                                           const InitSpec& init, double tol,
                                                           int max_iter) {
  return solve_fixed_point(model, weights, make_init(model, model.node_count(), init), tol,
                           max_iter);
}

MonotoneSolveResult monotone_solve(const SystemModel& model, const FusionWeights& weights,
                                   double tol, int max_iter) {
  constexpr double kSlack = 1e-10;
  double epsilon = min_eigenvalue(model.Q().mat()) / 2.0;

  // Shrink epsilon until the first step grows the family in the Loewner
  // order; a candidate below lambda_min(Q) always works since the step
  // output dominates Q, so this terminates immediately in practice.
  CovarianceFamily start = CovarianceFamily::scaled_identity(model.node_count(),
                                                             model.state_dim(), epsilon);
  for (int halving = 0;; ++halving) {
    const CovarianceFamily first = hcre_step(start, model, weights);
    bool grows = true;
    for (int i = 0; i < start.count(); ++i) {
      grows = grows && loewner_leq(start[i].mat(), first[i].mat(), kSlack);
    }
    if (grows) break;
    if (halving >= 120) {
      throw NumericalError("monotone_solve: no epsilon found with a nondecreasing first step");
    }
    epsilon /= 2.0;
    start = CovarianceFamily::scaled_identity(model.node_count(), model.state_dim(), epsilon);
  }

  SolveReport report;
  report.tolerance = tol;
  IterationTrace trace;
  trace.push(start);

  CovarianceFamily current = start;
  for (int k = 0; k < max_iter; ++k) {
    CovarianceFamily next = hcre_step(current, model, weights);
    for (int i = 0; i < current.count(); ++i) {
      if (!loewner_leq(current[i].mat(), next[i].mat(), kSlack)) {
        const double viol = min_eigenvalue(next[i].mat() - current[i].mat());
        throw NumericalError("monotone_solve: monotonicity violated at iteration " +
                             std::to_string(k + 1) + ", node " + std::to_string(i + 1) +
                             ", min eigenvalue of increment " + std::to_string(viol));
      }
    }
    report.residual = step_residual(current, next);
    report.iterations = k + 1;
    current = std::move(next);
    trace.push(current);
    if (report.residual <= tol) {
      report.converged = true;
      break;
    }
  }
  report.trace_history = trace.matrix();
  return MonotoneSolveResult{std::move(current), std::move(report), epsilon};
}

double verify_uniqueness(const SystemModel& model, const FusionWeights& weights,
                         const std::vector<CovarianceFamily>& inits, double tol, int max_iter) {
  if (inits.empty()) throw PreconditionError("verify_uniqueness: need at least one init");
  std::vector<CovarianceFamily> solutions;
  solutions.reserve(inits.size());
  for (const auto& init : inits) {
    auto [solution, report] = solve_fixed_point(model, weights, init, tol, max_iter);
    if (!report.converged) {
      throw NumericalError("verify_uniqueness: solve did not converge within " +
                           std::to_string(max_iter) + " iterations");
    }
    solutions.push_back(std::move(solution));
  }
  double gap = 0.0;
  for (size_t a = 0; a < solutions.size(); ++a) {
    for (size_t b = a + 1; b < solutions.size(); ++b) {
      for (int i = 0; i < solutions[a].count(); ++i) {
        gap = std::max(gap, sym_spectral_norm(solutions[a][i].mat() - solutions[b][i].mat()));
      }
    }
  }
  return gap;
}

double fixed_point_residual(const CovarianceFamily& family, const SystemModel& model,
                            const FusionWeights& weights) {
  return step_residual(family, hcre_step(family, model, weights));
}

ContractionCertificate contraction_certificate(const CovarianceFamily& solution,
                                               const SystemModel& model,
                                               const FusionWeights& weights) {
  if (fixed_point_residual(solution, model, weights) > 1e-8) {
    throw PreconditionError("contraction_certificate: input is not a fixed point");
  }
  const int n_nodes = model.node_count();
  const Eigen::Index n = model.state_dim();

  std::vector<MatrixXd> pinv;
  pinv.reserve(static_cast<size_t>(n_nodes));
  for (int j = 0; j < n_nodes; ++j) pinv.push_back(solution[j].inverse());

  // Ptilde_i, its information form, the fused posterior and the Riccati
  // closed loop A_{Ptilde_j} = A Pbar_j Ptilde_j^{-1}.
  std::vector<MatrixXd> ptilde(static_cast<size_t>(n_nodes));
  std::vector<MatrixXd> closed_loop(static_cast<size_t>(n_nodes));
  for (int i = 0; i < n_nodes; ++i) {
    MatrixXd ptilde_info = MatrixXd::Zero(n, n);
    MatrixXd obs = MatrixXd::Zero(n, n);
    for (int j = 0; j < n_nodes; ++j) {
      if (weights.L_mat(i, j) != 0.0) ptilde_info += weights.L_mat(i, j) * pinv[static_cast<size_t>(j)];
      if (weights.nu_mat(i, j) != 0.0) obs += weights.nu_mat(i, j) * model.obs_info(j);
    }
    ptilde[static_cast<size_t>(i)] = SpdMatrix(ptilde_info).inverse();
    const MatrixXd pbar = SpdMatrix(ptilde_info + obs).inverse();
    closed_loop[static_cast<size_t>(i)] = model.A() * pbar * ptilde_info;
  }

  std::vector<std::vector<MatrixXd>> blocks(static_cast<size_t>(n_nodes));
  for (int i = 0; i < n_nodes; ++i) {
    blocks[static_cast<size_t>(i)].assign(static_cast<size_t>(n_nodes), MatrixXd());
    for (int j = 0; j < n_nodes; ++j) {
      const double l = weights.L_mat(i, j);
      if (l == 0.0) continue;
      blocks[static_cast<size_t>(i)][static_cast<size_t>(j)] =
          std::sqrt(l) * ptilde[static_cast<size_t>(i)] * pinv[static_cast<size_t>(j)] *
          closed_loop[static_cast<size_t>(j)];
    }
  }

  ContractionCertificate cert;
  const Eigen::Index op_dim = static_cast<Eigen::Index>(n_nodes) * n * n;
  if (op_dim <= 600) {
    MatrixXd op = MatrixXd::Zero(op_dim, op_dim);
    for (int i = 0; i < n_nodes; ++i) {
      for (int j = 0; j < n_nodes; ++j) {
        if (blocks[static_cast<size_t>(i)][static_cast<size_t>(j)].size() == 0) continue;
        op.block(i * n * n, j * n * n, n * n, n * n) =
            kron(blocks[static_cast<size_t>(i)][static_cast<size_t>(j)],
                 blocks[static_cast<size_t>(i)][static_cast<size_t>(j)]);
      }
    }
    cert.rho = spectral_radius(op);
  } else {
    // Matrix-free power iteration on X_i -> sum_j A~_ij X_j A~_ij^T. The
    // map preserves the PSD cone, so the growth ratio from the identity
    // family converges to the dominant (real, nonnegative) eigenvalue.
    std::vector<MatrixXd> x(static_cast<size_t>(n_nodes), MatrixXd::Identity(n, n));
    double norm = std::sqrt(static_cast<double>(n_nodes) * n);
    for (auto& xi : x) xi /= norm;
    double ratio = 0.0;
    double prev = -1.0;
    int settled = 0;
    for (int it = 0; it < 100000 && settled < 3; ++it) {
      std::vector<MatrixXd> y(static_cast<size_t>(n_nodes), MatrixXd::Zero(n, n));
      for (int i = 0; i < n_nodes; ++i) {
        for (int j = 0; j < n_nodes; ++j) {
          const auto& b = blocks[static_cast<size_t>(i)][static_cast<size_t>(j)];
          if (b.size() == 0) continue;
          y[static_cast<size_t>(i)] += b * x[static_cast<size_t>(j)] * b.transpose();
        }
      }
      double sq = 0.0;
      for (const auto& yi : y) sq += yi.squaredNorm();
      ratio = std::sqrt(sq);
      if (ratio == 0.0) break;
      for (int i = 0; i < n_nodes; ++i) x[static_cast<size_t>(i)] = y[static_cast<size_t>(i)] / ratio;
      settled = std::abs(ratio - prev) <= 1e-10 * std::max(1.0, ratio) ? settled + 1 : 0;
      prev = ratio;
    }
    cert.rho = ratio;
  }
  cert.certified = cert.rho < 1.0;
  return cert;
}

BoundDemo classical_bound_demo() {
  // One-dimensional three-node chain: A=1, C = (1, none, none), Q=R=1,
  // degree-normalized weights on the path graph.
  const MatrixXd one = MatrixXd::Ones(1, 1);
  std::vector<Sensor> sensors(3);
  sensors[0] = Sensor{one, one};
  sensors[1] = Sensor{MatrixXd::Zero(0, 1), MatrixXd()};
  sensors[2] = Sensor{MatrixXd::Zero(0, 1), MatrixXd()};
  SystemModel model(one, SpdMatrix(one), std::move(sensors));

  Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> adj(3, 3);
  adj.setConstant(false);
  adj(0, 1) = adj(1, 0) = adj(1, 2) = adj(2, 1) = true;
  const FusionWeights weights = degree_normalized_weights(topology_from_adjacency(adj));

  BoundDemo demo;
  // Classical chain for the unobserving tail node: information reaching it
  // is bounded below through l_32 * (l_21 C_1^T R^{-1} C_1), and the
  // resulting covariance estimate with the contraction factor pushed to 1
  // evaluates to (0.5 * 1/3)^{-1} + Q = 7.
  demo.bound = 1.0 / (0.5 * (1.0 / 3.0)) + 1.0;
  demo.exact = solve_fixed_point(model, weights).first[2].trace();
  return demo;
}

}  // namespace hcre
