#include "hcre/filtersim.hpp"

#include "hcre/linalg.hpp"

#include <utility>
#include <vector>

namespace hcre {

namespace {

// Per-step normal-draw layout: process noise first, then sensors in node
// order. Returns the number of normals consumed per step.
std::uint64_t draws_per_step(const SystemModel& model) {
  std::uint64_t total = static_cast<std::uint64_t>(model.state_dim());
  for (int i = 0; i < model.node_count(); ++i) {
    total += static_cast<std::uint64_t>(model.sensor(i).meas_dim());
  }
  return total;
}

VectorXd draw_normals(const CounterRng& rng, std::uint64_t base, Eigen::Index count) {
  VectorXd z(count);
  for (Eigen::Index i = 0; i < count; ++i) z[i] = rng.normal(base + static_cast<std::uint64_t>(i));
  return z;
}

}  // namespace

Trajectory simulate_plant(const SystemModel& model, int horizon, const VectorXd& x0,
                          std::uint64_t seed, double noise_scale) {
  if (horizon < 1) throw PreconditionError("simulate_plant: horizon must be >= 1");
  if (x0.size() != model.state_dim()) throw PreconditionError("simulate_plant: x0 size mismatch");
  if (noise_scale < 0.0) throw PreconditionError("simulate_plant: negative noise scale");

  const Eigen::Index n = model.state_dim();
  const int n_nodes = model.node_count();
  const CounterRng rng(seed);
  const std::uint64_t per_step = draws_per_step(model);

  const MatrixXd q_chol = model.Q().cholesky_factor();
  std::vector<MatrixXd> r_chol(static_cast<size_t>(n_nodes));
  for (int i = 0; i < n_nodes; ++i) {
    const auto& s = model.sensor(i);
    if (s.meas_dim() > 0) {
      r_chol[static_cast<size_t>(i)] = SpdMatrix(s.R).cholesky_factor();
    }
  }

  Trajectory traj;
  traj.seed = seed;
  traj.noise_scale = noise_scale;
  traj.states.resize(horizon, n);
  traj.measurements.resize(static_cast<size_t>(n_nodes));
  for (int i = 0; i < n_nodes; ++i) {
    traj.measurements[static_cast<size_t>(i)].resize(horizon, model.sensor(i).meas_dim());
  }

  VectorXd x = x0;
  for (int k = 0; k < horizon; ++k) {
    traj.states.row(k) = x;
    std::uint64_t idx = static_cast<std::uint64_t>(k) * per_step;
    const VectorXd wz = draw_normals(rng, idx, n);
    idx += static_cast<std::uint64_t>(n);
    for (int i = 0; i < n_nodes; ++i) {
      const Eigen::Index m = model.sensor(i).meas_dim();
      if (m == 0) continue;
      const VectorXd vz = draw_normals(rng, idx, m);
      idx += static_cast<std::uint64_t>(m);
      traj.measurements[static_cast<size_t>(i)].row(k) =
          model.sensor(i).C * x + noise_scale * (r_chol[static_cast<size_t>(i)] * vz);
    }
    x = model.A() * x + noise_scale * (q_chol * wz);
  }
  return traj;
}

FilterBank default_bank(const SystemModel& model) {
  FilterBank bank{std::vector<VectorXd>(static_cast<size_t>(model.node_count()),
                                        VectorXd::Zero(model.state_dim())),
                  CovarianceFamily::identity(model.node_count(), model.state_dim()), 0};
  return bank;
}

CovariancePath build_covariance_path(const SystemModel& model, const FusionWeights& weights,
                                     const CovarianceFamily& init, int horizon) {
  if (horizon < 1) throw PreconditionError("build_covariance_path: horizon must be >= 1");
  const int n_nodes = model.node_count();
  const Eigen::Index n = model.state_dim();

  CovariancePath path;
  path.prior_info.resize(static_cast<size_t>(horizon));
  path.posterior.resize(static_cast<size_t>(horizon));

  CovarianceFamily prior = init;
  for (int k = 0; k < horizon; ++k) {
    auto& info_k = path.prior_info[static_cast<size_t>(k)];
    auto& post_k = path.posterior[static_cast<size_t>(k)];
    info_k.reserve(static_cast<size_t>(n_nodes));
    post_k.reserve(static_cast<size_t>(n_nodes));
    for (int j = 0; j < n_nodes; ++j) info_k.push_back(prior[j].inverse());

    std::vector<SpdMatrix> next;
    next.reserve(static_cast<size_t>(n_nodes));
    for (int i = 0; i < n_nodes; ++i) {
      MatrixXd fused = MatrixXd::Zero(n, n);
      for (int j = 0; j < n_nodes; ++j) {
        if (weights.L_mat(i, j) != 0.0) fused += weights.L_mat(i, j) * info_k[static_cast<size_t>(j)];
        if (weights.nu_mat(i, j) != 0.0) fused += weights.nu_mat(i, j) * model.obs_info(j);
      }
      post_k.push_back(SpdMatrix(fused).inverse());
      next.emplace_back(model.A() * post_k.back() * model.A().transpose() + model.Q().mat());
    }
    prior = CovarianceFamily(std::move(next));
  }
  return path;
}

FilterBank cidf_step(const FilterBank& bank, const std::vector<VectorXd>& measurements,
                     const SystemModel& model, const FusionWeights& weights) {
  const int n_nodes = model.node_count();
  if (bank.covs.count() != n_nodes || static_cast<int>(measurements.size()) != n_nodes) {
    throw PreconditionError("cidf_step: bank/measurement node counts disagree");
  }
  const Eigen::Index n = model.state_dim();

  // Prior information pairs.
  std::vector<MatrixXd> info(static_cast<size_t>(n_nodes));
  std::vector<VectorXd> info_vec(static_cast<size_t>(n_nodes));
  for (int j = 0; j < n_nodes; ++j) {
    info[static_cast<size_t>(j)] = bank.covs[j].inverse();
    info_vec[static_cast<size_t>(j)] = info[static_cast<size_t>(j)] * bank.xhat[static_cast<size_t>(j)];
  }

  FilterBank out{std::vector<VectorXd>(static_cast<size_t>(n_nodes)),
                 bank.covs,  // placeholder, replaced below
                 bank.step_index + 1};
  std::vector<SpdMatrix> next_cov;
  next_cov.reserve(static_cast<size_t>(n_nodes));

  for (int i = 0; i < n_nodes; ++i) {
    MatrixXd fused_info = MatrixXd::Zero(n, n);
    VectorXd fused_vec = VectorXd::Zero(n);
    for (int j = 0; j < n_nodes; ++j) {
      const double l = weights.L_mat(i, j);
      if (l != 0.0) {
        fused_info += l * info[static_cast<size_t>(j)];
        fused_vec += l * info_vec[static_cast<size_t>(j)];
      }
      const double nu = weights.nu_mat(i, j);
      if (nu != 0.0 && model.sensor(j).meas_dim() > 0) {
        fused_info += nu * model.obs_info(j);
        fused_vec += nu * (model.obs_gain(j) * measurements[static_cast<size_t>(j)]);
      }
    }
    const SpdMatrix posterior_info(fused_info);
    const VectorXd posterior_mean = posterior_info.solve(fused_vec);
    out.xhat[static_cast<size_t>(i)] = model.A() * posterior_mean;
    next_cov.emplace_back(model.A() * posterior_info.inverse() * model.A().transpose() +
                          model.Q().mat());
  }
  out.covs = CovarianceFamily(std::move(next_cov));
  return out;
}

namespace {

std::vector<VectorXd> measurements_at(const Trajectory& traj, int k) {
  std::vector<VectorXd> out;
  out.reserve(traj.measurements.size());
  for (const auto& series : traj.measurements) out.push_back(series.row(k));
  return out;
}

}  // namespace

FilterRun run_filter(const SystemModel& model, const FusionWeights& weights,
                     const Trajectory& traj, const FilterBank& bank0) {
  const int horizon = traj.horizon();
  FilterRun run{std::vector<MatrixXd>(static_cast<size_t>(model.node_count()),
                                      MatrixXd(horizon, model.state_dim())),
                bank0};
  for (int k = 0; k < horizon; ++k) {
    for (int i = 0; i < model.node_count(); ++i) {
      run.errors[static_cast<size_t>(i)].row(k) =
          traj.states.row(k).transpose() - run.final_bank.xhat[static_cast<size_t>(i)];
    }
    run.final_bank = cidf_step(run.final_bank, measurements_at(traj, k), model, weights);
  }
  return run;
}

FilterRun run_filter(const SystemModel& model, const FusionWeights& weights,
                     const Trajectory& traj, const FilterBank& bank0,
                     const CovariancePath& path) {
  const int horizon = traj.horizon();
  if (path.horizon() < horizon) {
    throw PreconditionError("run_filter: covariance path shorter than the trajectory");
  }
  const int n_nodes = model.node_count();
  const Eigen::Index n = model.state_dim();

  FilterRun run{std::vector<MatrixXd>(static_cast<size_t>(n_nodes), MatrixXd(horizon, n)), bank0};
  std::vector<VectorXd> xhat = bank0.xhat;
  std::vector<VectorXd> z(static_cast<size_t>(n_nodes));
  for (int k = 0; k < horizon; ++k) {
    const auto& info_k = path.prior_info[static_cast<size_t>(k)];
    const auto& post_k = path.posterior[static_cast<size_t>(k)];
    for (int j = 0; j < n_nodes; ++j) {
      run.errors[static_cast<size_t>(j)].row(k) =
          traj.states.row(k).transpose() - xhat[static_cast<size_t>(j)];
      z[static_cast<size_t>(j)] = info_k[static_cast<size_t>(j)] * xhat[static_cast<size_t>(j)];
    }
    std::vector<VectorXd> next(static_cast<size_t>(n_nodes));
    for (int i = 0; i < n_nodes; ++i) {
      VectorXd fused = VectorXd::Zero(n);
      for (int j = 0; j < n_nodes; ++j) {
        const double l = weights.L_mat(i, j);
        if (l != 0.0) fused += l * z[static_cast<size_t>(j)];
        const double nu = weights.nu_mat(i, j);
        if (nu != 0.0 && model.sensor(j).meas_dim() > 0) {
          fused += nu * (model.obs_gain(j) * traj.measurements[static_cast<size_t>(j)].row(k).transpose());
        }
      }
      next[static_cast<size_t>(i)] = model.A() * (post_k[static_cast<size_t>(i)] * fused);
    }
    xhat = std::move(next);
  }
  run.final_bank.xhat = xhat;
  run.final_bank.step_index = bank0.step_index + horizon;
  // Final covariances: propagate the last recorded posterior.
  std::vector<SpdMatrix> last;
  last.reserve(static_cast<size_t>(n_nodes));
  const auto& post_last = path.posterior[static_cast<size_t>(horizon - 1)];
  for (int i = 0; i < n_nodes; ++i) {
    last.emplace_back(model.A() * post_last[static_cast<size_t>(i)] * model.A().transpose() +
                      model.Q().mat());
  }
  run.final_bank.covs = CovarianceFamily(std::move(last));
  return run;
}

void accumulate_squared_errors(const SystemModel& model, const FusionWeights& weights,
                               const Trajectory& traj, const std::vector<VectorXd>& xhat0,
                               const CovariancePath& path, MatrixXd& sq) {
  const int horizon = traj.horizon();
  const int n_nodes = model.node_count();
  const Eigen::Index n = model.state_dim();
  if (sq.rows() != n_nodes || sq.cols() != horizon) {
    throw PreconditionError("accumulate_squared_errors: accumulator shape mismatch");
  }

  std::vector<VectorXd> xhat = xhat0;
  std::vector<VectorXd> z(static_cast<size_t>(n_nodes));
  std::vector<VectorXd> next(static_cast<size_t>(n_nodes));
  for (int k = 0; k < horizon; ++k) {
    const auto& info_k = path.prior_info[static_cast<size_t>(k)];
    const auto& post_k = path.posterior[static_cast<size_t>(k)];
    const VectorXd xk = traj.states.row(k);
    for (int j = 0; j < n_nodes; ++j) {
      sq(j, k) += (xk - xhat[static_cast<size_t>(j)]).squaredNorm();
      z[static_cast<size_t>(j)] = info_k[static_cast<size_t>(j)] * xhat[static_cast<size_t>(j)];
    }
    for (int i = 0; i < n_nodes; ++i) {
      VectorXd fused = VectorXd::Zero(n);
      for (int j = 0; j < n_nodes; ++j) {
        const double l = weights.L_mat(i, j);
        if (l != 0.0) fused += l * z[static_cast<size_t>(j)];
        const double nu = weights.nu_mat(i, j);
        if (nu != 0.0 && model.sensor(j).meas_dim() > 0) {
          fused += nu * (model.obs_gain(j) * traj.measurements[static_cast<size_t>(j)].row(k).transpose());
        }
      }
      next[static_cast<size_t>(i)] = model.A() * (post_k[static_cast<size_t>(i)] * fused);
    }
    xhat.swap(next);
  }
}

}  // namespace hcre
