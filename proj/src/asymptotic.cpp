#include "hcre/asymptotic.hpp"

#include "hcre/linalg.hpp"
#include "hcre/solver.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <string>
#include <utility>

namespace hcre {

namespace {

// Riccati iteration with a fixed pooled information matrix.
SpdMatrix pooled_riccati(const SystemModel& model, const MatrixXd& info, double tol,
                         int max_iter) {
  const Eigen::Index n = model.state_dim();
  MatrixXd p = MatrixXd::Identity(n, n);
  for (int k = 0; k < max_iter; ++k) {
    const SpdMatrix fused(SpdMatrix(p).inverse() + info);
    const MatrixXd next =
        symmetrized(model.A() * fused.inverse() * model.A().transpose() + model.Q().mat());
    const double res = (next - p).norm() / p.norm();
    p = next;
    if (res <= tol) return SpdMatrix(p);
  }
  throw NumericalError("pooled riccati iteration did not converge");
}

// Rows of a square root of a PSD information matrix, for the rank test.
MatrixXd psd_sqrt_rows(const MatrixXd& info) {
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(symmetrized(info));
  const VectorXd& ev = es.eigenvalues();
  const double thresh = std::max(ev.maxCoeff(), 0.0) * 1e-14;
  MatrixXd rows(info.rows(), info.cols());
  Eigen::Index r = 0;
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    if (ev[i] > thresh && ev[i] > 0.0) {
      rows.row(r++) = std::sqrt(ev[i]) * es.eigenvectors().col(i).transpose();
    }
  }
  return rows.topRows(r);
}

}  // namespace

LimitWeights limit_weights(const FusionWeights& weights) {
  if (!weights.L_mat.row_stochastic()) {
    throw PreconditionError("limit_weights: L is not row stochastic");
  }
  if (!weights.nu_mat.row_stochastic()) {
    throw PreconditionError(
        "limit_weights: nu is not row stochastic; its powers have no stochastic limit row");
  }
  LimitWeights out;
  out.mu2 = perron_left_vector(weights.L_mat);
  out.mu4 = perron_left_vector(weights.nu_mat);
  return out;
}

SpdMatrix asymptotic_fixed_point(const SystemModel& model, const VectorXd& mu4, double tol,
                                 int max_iter) {
  if (mu4.size() != model.node_count()) {
    throw PreconditionError("asymptotic_fixed_point: mu4 length must equal the node count");
  }
  if ((mu4.array() < 0.0).any()) {
    throw PreconditionError("asymptotic_fixed_point: mu4 must be nonnegative");
  }
  const Eigen::Index n = model.state_dim();
  MatrixXd info = MatrixXd::Zero(n, n);
  for (int j = 0; j < model.node_count(); ++j) {
    if (mu4[j] != 0.0) info += mu4[j] * model.obs_info(j);
  }
  if (!is_collectively_observable(model.A(), {psd_sqrt_rows(info)})) {
    throw PreconditionError("asymptotic_fixed_point: pooled information sum is undetectable");
  }
  return pooled_riccati(model, info, tol, max_iter);
}

SpdMatrix centralized_riccati(const SystemModel& model, double tol, int max_iter) {
  if (!is_collectively_observable(model.A(), model.c_blocks())) {
    throw PreconditionError("centralized_riccati: system is not collectively observable");
  }
  const Eigen::Index n = model.state_dim();
  MatrixXd info = MatrixXd::Zero(n, n);
  for (int j = 0; j < model.node_count(); ++j) info += model.obs_info(j);
  return pooled_riccati(model, info, tol, max_iter);
}

DepthSweepResult fusion_depth_sweep(const SystemModel& model, const Topology& topo,
                                    Variant variant, const std::vector<int>& depths, double tol,
                                    std::optional<double> epsilon,
                                    std::optional<VectorXd> omega) {
  if (depths.empty()) throw PreconditionError("fusion_depth_sweep: empty depth list");
  DepthSweepResult out;
  out.variant = variant;
  out.centralized_trace = centralized_riccati(model).trace();

  NonnegativeMatrix base = degree_normalized_weights(topo).L_mat;
  switch (variant) {
    case Variant::Cidf: {
      const bool doubly = ((base.mat().colwise().sum().array() - 1.0).abs() <= 1e-12).all();
      if (!doubly) {
        base = metropolis_weights(topo);
        out.metropolis_substituted = true;
      }
      out.asymptotic_trace =
          asymptotic_fixed_point(model, perron_left_vector(base)).trace();
      break;
    }
    case Variant::Icf:
      // Deep-fusion information weights approach all-ones rows, so the
      // reference is the centralized optimum directly.
      out.asymptotic_trace = out.centralized_trace;
      break;
    case Variant::Cmci: {
      const VectorXd w = omega.value_or(VectorXd::Ones(topo.N));
      const VectorXd mu4 = perron_left_vector(base).cwiseProduct(w);
      out.asymptotic_trace = asymptotic_fixed_point(model, mu4).trace();
      break;
    }
    case Variant::Custom:
      throw PreconditionError("fusion_depth_sweep: custom variant has no depth law");
  }

  for (const int depth : depths) {
    FusionWeights weights = [&] {
      switch (variant) {
        case Variant::Icf:
          return weights_for(topo, variant, depth, epsilon, std::nullopt);
        case Variant::Cmci:
          return weights_for(topo, variant, depth, std::nullopt, omega);
        default: {
          const NonnegativeMatrix powered = base.power(depth);
          return FusionWeights{powered, powered, Variant::Cidf, depth, std::nullopt,
                               std::nullopt};
        }
      }
    }();
    auto [solution, report] = solve_fixed_point(model, weights, InitSpec::identity(), tol);
    if (!report.converged) {
      throw NumericalError("fusion_depth_sweep: solve did not converge at depth " +
                           std::to_string(depth));
    }
    out.rows.push_back({depth, solution.traces()});
  }
  return out;
}

}  // namespace hcre
