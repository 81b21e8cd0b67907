#include "hcre/harness.hpp"

#include "hcre/linalg.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <vector>

namespace hcre {

namespace {

Sensor no_measurement(int n) { return Sensor{MatrixXd::Zero(0, n), MatrixXd()}; }

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::ofstream open_out(const std::string& path) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(p.parent_path(), ec);
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  return out;
}

}  // namespace

std::pair<SystemModel, FusionWeights> preset_scalar_example() {
  return {scalar_example_model(), degree_normalized_weights(scalar_example_topology())};
}

Topology scalar_example_topology() {
  Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> adj(3, 3);
  adj.setConstant(false);
  adj(0, 1) = adj(1, 0) = adj(1, 2) = adj(2, 1) = true;
  return topology_from_adjacency(adj);
}

SystemModel scalar_example_model() {
  const MatrixXd one = MatrixXd::Ones(1, 1);
  std::vector<Sensor> sensors;
  sensors.push_back(Sensor{one, one});
  sensors.push_back(no_measurement(1));
  sensors.push_back(no_measurement(1));
  return SystemModel(one, SpdMatrix(one), std::move(sensors));
}

namespace {

std::vector<Sensor> fifty_node_sensors(const MatrixXd& c1, const MatrixXd& c2, double r) {
  const int n = static_cast<int>(c1.cols());
  const MatrixXd rm = r * MatrixXd::Ones(1, 1);
  std::vector<Sensor> sensors;
  sensors.reserve(50);
  for (int i = 0; i < 3; ++i) sensors.push_back(Sensor{c1, rm});
  for (int i = 0; i < 3; ++i) sensors.push_back(Sensor{c2, rm});
  for (int i = 0; i < 44; ++i) sensors.push_back(no_measurement(n));
  return sensors;
}

}  // namespace

std::pair<SystemModel, Topology> preset_random6d(std::uint64_t network_seed) {
  MatrixXd a(6, 6);
  a << 0.3836, 0.2558, 0.2525, 0.1766, 0.4524, 0.3534,
       0.1978, 0.2351, 0.4546, 0.5642, 0.1793, 0.4899,
       0.3322, 0.4508, 0.4779, 0.4064, 0.5716, 0.4073,
       0.5927, 0.4560, 0.5109, 0.6161, 0.2135, 0.1504,
       0.6139, 0.4898, 0.3574, 0.3858, 0.6741, 0.6985,
       0.5016, 0.0795, 0.0191, 0.5526, 0.0543, 0.4081;
  MatrixXd q(6, 6);
  q <<  1.79, -0.69,  0.48, -0.39, -0.26, -0.25,
       -0.69,  1.45, -0.07,  0.01,  0.56,  0.05,
        0.48, -0.07,  2.12, -0.11, -0.61, -0.61,
       -0.39,  0.01, -0.11,  1.88,  0.49,  0.46,
       -0.26,  0.56, -0.61,  0.49,  2.37,  0.20,
       -0.25,  0.05, -0.61,  0.46,  0.20,  1.24;
  MatrixXd c1(1, 6), c2(1, 6);
  c1 << 0.3711, 0.4438, 0.2733, 0.3920, 0.3768, 0.1424;
  c2 << 0.7154, 0.3439, 0.4017, 0.9339, 0.1471, 0.2543;

  SystemModel model(a, SpdMatrix(q), fifty_node_sensors(c1, c2, 0.3818));
  return {std::move(model), random_geometric_topology(50, 500.0, 110.0, network_seed)};
}

std::pair<SystemModel, Topology> preset_target_tracking(std::uint64_t network_seed) {
  const double t = 1.0;  // sample interval
  MatrixXd a = MatrixXd::Zero(4, 4);
  a << 1, t, 0, 0,
       0, 1, 0, 0,
       0, 0, 1, t,
       0, 0, 0, 1;
  MatrixXd g(2, 2);
  g << t * t * t / 3.0, t * t / 2.0,
       t * t / 2.0,     t;
  MatrixXd q(4, 4);
  q.topLeftCorner(2, 2) = g;
  q.topRightCorner(2, 2) = 0.5 * g;
  q.bottomLeftCorner(2, 2) = 0.5 * g;
  q.bottomRightCorner(2, 2) = g;
  MatrixXd c1(1, 4), c2(1, 4);
  c1 << 1, 0, 0, 0;
  c2 << 0, 0, 1, 0;

  SystemModel model(a, SpdMatrix(q), fifty_node_sensors(c1, c2, 1.0));
  return {std::move(model), random_geometric_topology(50, 500.0, 110.0, network_seed)};
}

std::string preset_name(Preset p) {
  switch (p) {
    case Preset::ScalarExample: return "scalar";
    case Preset::Random6d: return "random6d";
    case Preset::TargetTracking: return "tracking";
    case Preset::Custom: return "custom";
  }
  return "unknown";
}

McReport monte_carlo(const SystemModel& model, const FusionWeights& weights,
                     const McOptions& opts) {
  if (opts.trials < 1 || opts.horizon < 1) {
    throw PreconditionError("monte_carlo: trials and horizon must be >= 1");
  }
  const ValidationReport vr = validate(model, weights);
  if (!vr.all_pass()) {
    throw PreconditionError("monte_carlo: model/weights failed validation:\n" + vr.to_string());
  }

  McReport report;
  report.trials = opts.trials;
  report.horizon = opts.horizon;
  report.seed = opts.seed;
  report.variant = variant_name(weights.variant);
  report.depth = weights.fusion_depth;

  // Steady-state theory: fixed point, error operators, DLE covariance.
  auto [solution, solve_report] = solve_fixed_point(model, weights, InitSpec::identity(),
                                                    opts.tol, opts.max_iter);
  if (!solve_report.converged) {
    throw NumericalError("monte_carlo: fixed-point solve did not converge");
  }
  report.solver_residual = solve_report.residual;
  report.solver_iterations = solve_report.iterations;
  const SteadyOperators ops = build_error_operators(solution, model, weights);
  report.rho_acal = spectral_radius(ops.Acal);
  report.theory_mse = steady_covariance(ops).network_mse;

  // Covariances are data-independent, so one path serves every trial.
  const FilterBank bank0 = default_bank(model);
  const CovariancePath path = build_covariance_path(model, weights, bank0.covs, opts.horizon);

  MatrixXd sq = MatrixXd::Zero(model.node_count(), opts.horizon);
  const VectorXd x0 = VectorXd::Zero(model.state_dim());
  for (int l = 0; l < opts.trials; ++l) {
    const Trajectory traj = simulate_plant(model, opts.horizon, x0,
                                           opts.seed + static_cast<std::uint64_t>(l),
                                           opts.noise_scale);
    accumulate_squared_errors(model, weights, traj, bank0.xhat, path, sq);
  }
  report.mse_ik = sq / static_cast<double>(opts.trials);
  report.mse_k = report.mse_ik.colwise().mean();

  const int tail_start = (3 * opts.horizon) / 4;
  report.tail_mean = report.mse_k.tail(opts.horizon - tail_start).mean();
  report.relative_gap_tail = std::abs(report.tail_mean - report.theory_mse) / report.theory_mse;
  return report;
}

McReport monte_carlo(const ExperimentConfig& cfg) {
  auto run = [&](const SystemModel& model, const FusionWeights& weights,
                 std::uint64_t net_seed) {
    McOptions opts{cfg.trials, cfg.horizon, cfg.seed, cfg.noise_scale, cfg.tol, cfg.max_iter};
    McReport report = monte_carlo(model, weights, opts);
    report.preset = preset_name(cfg.preset);
    report.network_seed = net_seed;
    return report;
  };

  switch (cfg.preset) {
    case Preset::ScalarExample: {
      auto [model, topo] = std::pair{scalar_example_model(), scalar_example_topology()};
      const FusionWeights weights = weights_for(topo, cfg.variant, cfg.depth, cfg.epsilon,
                                                cfg.omega);
      return run(model, weights, 0);
    }
    case Preset::Random6d: {
      auto [model, topo] = preset_random6d(cfg.network_seed);
      const FusionWeights weights = weights_for(topo, cfg.variant, cfg.depth, cfg.epsilon,
                                                cfg.omega);
      return run(model, weights, topo.seed_used);
    }
    case Preset::TargetTracking: {
      auto [model, topo] = preset_target_tracking(cfg.network_seed);
      const FusionWeights weights = weights_for(topo, cfg.variant, cfg.depth, cfg.epsilon,
                                                cfg.omega);
      return run(model, weights, topo.seed_used);
    }
    case Preset::Custom:
      break;
  }
  throw PreconditionError("monte_carlo: custom experiments must supply model and weights");
}

void emit_report(const McReport& report, const std::string& prefix) {
  {
    auto out = open_out(prefix + "mse_curves.csv");
    out << "k,mse_k,theory_mse\n";
    for (int k = 0; k < report.horizon; ++k) {
      out << k << "," << fmt(report.mse_k[k]) << "," << fmt(report.theory_mse) << "\n";
    }
  }
  {
    auto out = open_out(prefix + "per_node.csv");
    out << "k,node,mse_ik\n";
    for (int k = 0; k < report.horizon; ++k) {
      for (int i = 0; i < report.mse_ik.rows(); ++i) {
        out << k << "," << (i + 1) << "," << fmt(report.mse_ik(i, k)) << "\n";
      }
    }
  }
  {
    nlohmann::ordered_json j;
    j["preset"] = report.preset;
    j["variant"] = report.variant;
    j["depth"] = report.depth;
    j["trials"] = report.trials;
    j["horizon"] = report.horizon;
    j["seed"] = report.seed;
    j["network_seed"] = report.network_seed;
    j["theory_mse"] = report.theory_mse;
    j["tail_mean"] = report.tail_mean;
    j["relative_gap_tail"] = report.relative_gap_tail;
    j["solver_residual"] = report.solver_residual;
    j["solver_iterations"] = report.solver_iterations;
    j["rho_acal"] = report.rho_acal;
    auto out = open_out(prefix + "summary.json");
    out << j.dump(2) << "\n";
  }
}

}  // namespace hcre
