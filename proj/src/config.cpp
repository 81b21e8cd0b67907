#include "hcre/config.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>
#include <vector>

namespace hcre {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& msg) {
  throw PreconditionError("config: " + msg);
}

// A matrix is either a plain number (1x1) or an array of equal-length rows.
MatrixXd parse_matrix(const json& j, const std::string& what) {
  if (j.is_number()) {
    MatrixXd m(1, 1);
    m(0, 0) = j.get<double>();
    return m;
  }
  if (!j.is_array() || j.empty() || !j[0].is_array()) {
    fail(what + " must be a number or an array of row arrays");
  }
  const size_t rows = j.size();
  const size_t cols = j[0].size();
  MatrixXd m(rows, cols);
  for (size_t r = 0; r < rows; ++r) {
    if (!j[r].is_array() || j[r].size() != cols) fail(what + " has ragged rows");
    for (size_t c = 0; c < cols; ++c) m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = j[r][c].get<double>();
  }
  return m;
}

SystemModel parse_system(const json& j) {
  if (!j.contains("A") || !j.contains("Q") || !j.contains("sensors")) {
    fail("system needs A, Q and sensors");
  }
  const MatrixXd a = parse_matrix(j["A"], "system.A");
  const MatrixXd q = parse_matrix(j["Q"], "system.Q");
  const int n = static_cast<int>(a.rows());

  std::vector<Sensor> sensors;
  for (const auto& sj : j["sensors"]) {
    const int count = sj.value("count", 1);
    if (count < 1) fail("sensor count must be >= 1");
    Sensor s;
    if (sj.contains("C")) {
      s.C = parse_matrix(sj["C"], "sensor.C");
      if (!sj.contains("R")) fail("measuring sensor needs R");
      s.R = parse_matrix(sj["R"], "sensor.R");
    } else {
      s.C = MatrixXd::Zero(0, n);
      s.R = MatrixXd();
    }
    for (int c = 0; c < count; ++c) sensors.push_back(s);
  }
  return SystemModel(a, SpdMatrix(q), std::move(sensors));
}

Topology parse_topology(const json& j, int n_nodes) {
  if (j.contains("adjacency")) {
    const MatrixXd adj = parse_matrix(j["adjacency"], "topology.adjacency");
    if (adj.rows() != n_nodes) {
      fail("adjacency size does not match the sensor count");
    }
    const Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> b = (adj.array() != 0.0);
    return topology_from_adjacency(b);
  }
  if (j.contains("geometric")) {
    const auto& g = j["geometric"];
    const int nodes = g.value("nodes", n_nodes);
    if (nodes != n_nodes) fail("geometric.nodes does not match the sensor count");
    return random_geometric_topology(nodes, g.at("width").get<double>(),
                                     g.at("radius").get<double>(),
                                     g.value("seed", std::uint64_t{1}));
  }
  fail("topology needs either adjacency or geometric");
}

FusionWeights parse_weights(const json& root, const Topology& topo) {
  if (!root.contains("weights")) return degree_normalized_weights(topo);
  const auto& j = root["weights"];
  const std::string v = j.value("variant", "cidf");
  const int depth = j.value("depth", 1);

  Variant variant;
  if (v == "cidf") variant = Variant::Cidf;
  else if (v == "icf") variant = Variant::Icf;
  else if (v == "cmci") variant = Variant::Cmci;
  else fail("unknown weights.variant '" + v + "'");

  std::optional<double> epsilon;
  if (j.contains("epsilon")) epsilon = j["epsilon"].get<double>();
  std::optional<VectorXd> omega;
  if (j.contains("omega")) {
    if (j["omega"].is_number()) {
      omega = VectorXd::Constant(topo.N, j["omega"].get<double>());
    } else {
      const auto vals = j["omega"].get<std::vector<double>>();
      omega = Eigen::Map<const VectorXd>(vals.data(), static_cast<Eigen::Index>(vals.size()));
    }
  }
  return weights_for(topo, variant, depth, epsilon, omega);
}

}  // namespace

LoadedConfig parse_config(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    fail(std::string("invalid JSON: ") + e.what());
  }
  if (!root.contains("system")) fail("missing system section");
  if (!root.contains("topology")) fail("missing topology section");
  SystemModel model = parse_system(root["system"]);
  Topology topo = parse_topology(root["topology"], model.node_count());
  FusionWeights weights = parse_weights(root, topo);
  return LoadedConfig{std::move(model), std::move(topo), std::move(weights)};
}

LoadedConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

}  // namespace hcre
