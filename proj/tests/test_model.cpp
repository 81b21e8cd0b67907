#include "hcre/model.hpp"

#include "hcre/config.hpp"
#include "hcre/linalg.hpp"
#include "support.hpp"

#include <doctest.h>

#include <random>

using namespace hcre;

TEST_SUITE_BEGIN("model");

TEST_CASE("spd construction symmetrizes and rejects indefinite input") {
  MatrixXd skewed(2, 2);
  skewed << 2.0, 0.3 + 1e-13, 0.3 - 1e-13, 2.0;
  const SpdMatrix p(skewed);
  CHECK((p.mat() - p.mat().transpose()).norm() == 0.0);

  MatrixXd indef(2, 2);
  indef << 1, 0, 0, -1;
  CHECK_THROWS_AS(SpdMatrix{indef}, NumericalError);
}

TEST_CASE("geometric topology is reproducible and connected") {
  const Topology a = random_geometric_topology(50, 500, 110, 1);
  const Topology b = random_geometric_topology(50, 500, 110, 1);
  CHECK(a.seed_used == b.seed_used);
  CHECK((a.adjacency.cast<int>() - b.adjacency.cast<int>()).cwiseAbs().sum() == 0);
  CHECK(a.strongly_connected());
  for (int i = 0; i < a.N; ++i) CHECK(a.adjacency(i, i));

  const Topology single = random_geometric_topology(1, 500, 110, 3);
  CHECK(single.N == 1);
  CHECK(single.strongly_connected());

  CHECK_THROWS_AS(random_geometric_topology(2, 500, 1e-6, 1), NumericalError);
}

TEST_CASE("degree-normalized weights") {
  Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> complete(3, 3);
  complete.setConstant(true);
  const FusionWeights wc = degree_normalized_weights(topology_from_adjacency(complete));
  CHECK((wc.L_mat.mat().array() - 1.0 / 3.0).abs().maxCoeff() < 1e-15);

  const FusionWeights wp = degree_normalized_weights(test::path3_topology());
  MatrixXd expected(3, 3);
  expected << 0.5, 0.5, 0, 1.0 / 3, 1.0 / 3, 1.0 / 3, 0, 0.5, 0.5;
  CHECK((wp.L_mat.mat() - expected).norm() < 1e-15);
  CHECK((wp.nu_mat.mat() - expected).norm() < 1e-15);

  Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> one(1, 1);
  one.setConstant(true);
  CHECK(degree_normalized_weights(topology_from_adjacency(one)).L_mat.mat()(0, 0) == 1.0);

  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 30; ++trial) {
    const Topology t = test::random_topology(rng, 2 + static_cast<int>(rng() % 5));
    const FusionWeights w = degree_normalized_weights(t);
    CHECK((w.L_mat.mat().rowwise().sum().array() - 1.0).abs().maxCoeff() < 1e-12);
    CHECK(is_primitive(w.L_mat));
  }
}

TEST_CASE("metropolis weights are doubly stochastic") {
  const NonnegativeMatrix m = metropolis_weights(test::path3_topology());
  CHECK((m.mat().rowwise().sum().array() - 1.0).abs().maxCoeff() < 1e-15);
  CHECK((m.mat().colwise().sum().array() - 1.0).abs().maxCoeff() < 1e-15);
  CHECK(m.mat()(0, 1) == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("icf weights") {
  Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> pair(2, 2);
  pair.setConstant(true);
  const Topology t2 = topology_from_adjacency(pair);

  const FusionWeights w = icf_weights(t2, 0.5, 1);
  CHECK((w.L_mat.mat() - MatrixXd::Constant(2, 2, 0.5)).norm() < 1e-15);
  CHECK((w.nu_mat.mat() - MatrixXd::Constant(2, 2, 1.0)).norm() < 1e-15);

  // epsilon -> 0: consensus matrix tends to the identity, nu to N I.
  const FusionWeights tiny = icf_weights(t2, 1e-9, 3);
  CHECK((tiny.L_mat.mat() - MatrixXd::Identity(2, 2)).norm() < 1e-7);
  CHECK((tiny.nu_mat.mat() - 2.0 * MatrixXd::Identity(2, 2)).norm() < 1e-7);

  CHECK_THROWS_AS(icf_weights(t2, 1.5, 1), PreconditionError);
  CHECK_THROWS_AS(icf_weights(t2, 0.0, 1), PreconditionError);

  std::mt19937_64 rng(22);
  for (int trial = 0; trial < 20; ++trial) {
    const Topology t = test::random_topology(rng, 3 + static_cast<int>(rng() % 4));
    const int depth = 1 + static_cast<int>(rng() % 6);
    const FusionWeights wi = icf_weights(t, 0.65 / t.max_degree_excl_self(), depth);
    CHECK((wi.L_mat.mat().rowwise().sum().array() - 1.0).abs().maxCoeff() < 1e-12);
    CHECK(is_primitive(wi.L_mat));
  }
}

TEST_CASE("cmci weights") {
  const Topology path = test::path3_topology();
  const FusionWeights base = degree_normalized_weights(path);

  const FusionWeights ones = cmci_weights(path, VectorXd::Ones(3), 1);
  CHECK((ones.L_mat.mat() - base.L_mat.mat()).norm() < 1e-15);
  CHECK((ones.nu_mat.mat() - base.nu_mat.mat()).norm() < 1e-15);

  const FusionWeights deep = cmci_weights(path, VectorXd::Ones(3), 3);
  CHECK((deep.nu_mat.mat() - deep.L_mat.mat()).norm() < 1e-15);

  const FusionWeights inflated = cmci_weights(path, VectorXd::Constant(3, 3.0), 2);
  CHECK((inflated.nu_mat.mat() - 3.0 * inflated.L_mat.mat()).norm() < 1e-14);

  const VectorXd omega = (VectorXd(3) << 1, 2, 3).finished();
  const FusionWeights mixed = cmci_weights(path, omega, 1);
  CHECK(mixed.nu_mat(1, 0) == doctest::Approx(1.0 / 3.0));
  CHECK(mixed.nu_mat(1, 1) == doctest::Approx(2.0 / 3.0));
  CHECK(mixed.nu_mat(1, 2) == doctest::Approx(1.0));

  CHECK_THROWS_AS(cmci_weights(path, VectorXd::Zero(3), 1), PreconditionError);
}

TEST_CASE("validation reports") {
  const MatrixXd one = MatrixXd::Ones(1, 1);
  std::vector<Sensor> sensors;
  sensors.push_back(Sensor{one, one});
  sensors.push_back(Sensor{MatrixXd::Zero(0, 1), MatrixXd()});
  sensors.push_back(Sensor{MatrixXd::Zero(0, 1), MatrixXd()});
  const SystemModel scalar(one, SpdMatrix(one), sensors);
  const FusionWeights weights = degree_normalized_weights(test::path3_topology());
  CHECK(validate(scalar, weights).all_pass());

  const SystemModel singular(MatrixXd::Zero(1, 1), SpdMatrix(one), sensors);
  const ValidationReport r1 = validate(singular, weights);
  CHECK_FALSE(r1.all_pass());
  bool found = false;
  for (const auto& c : r1.checks)
    if (c.name == "a_invertible") found = !c.pass;
  CHECK(found);

  const NonnegativeMatrix eye(MatrixXd::Identity(3, 3));
  const FusionWeights idw{eye, eye, Variant::Custom, 1, std::nullopt, std::nullopt};
  const ValidationReport r2 = validate(scalar, idw);
  CHECK_FALSE(r2.all_pass());
  for (const auto& c : r2.checks)
    if (c.name == "l_primitive") CHECK_FALSE(c.pass);
}

TEST_CASE("config parsing") {
  const std::string text = R"({
    "system": {
      "A": [[1.0, 1.0], [0.0, 1.0]],
      "Q": [[1.0, 0.0], [0.0, 1.0]],
      "sensors": [
        {"C": [[1.0, 0.0]], "R": 0.5, "count": 2},
        {"count": 1}
      ]
    },
    "topology": {"adjacency": [[1,1,0],[1,1,1],[0,1,1]]},
    "weights": {"variant": "cidf", "depth": 1}
  })";
  const LoadedConfig cfg = parse_config(text);
  CHECK(cfg.model.node_count() == 3);
  CHECK(cfg.model.state_dim() == 2);
  CHECK(cfg.model.sensor(0).meas_dim() == 1);
  CHECK(cfg.model.sensor(2).meas_dim() == 0);
  CHECK(cfg.topo.N == 3);
  CHECK(cfg.weights.L_mat.row_stochastic());
  CHECK(validate(cfg.model, cfg.weights).all_pass());

  CHECK_THROWS_AS(parse_config("{}"), PreconditionError);
  CHECK_THROWS_AS(parse_config("not json"), PreconditionError);
}

TEST_CASE("topology diameter") {
  const Topology path = test::path3_topology();
  CHECK(path.diameter() == 2);
  CHECK(path.max_degree_excl_self() == 2);
}

TEST_SUITE_END();
