// JSON experiment configuration: system matrices, sensor kinds with
// replication counts, topology (explicit adjacency or geometric recipe)
// and fusion-weight selection. The schema is documented in the README.
#pragma once

#include "hcre/model.hpp"

#include <string>

namespace hcre {

struct LoadedConfig {
  SystemModel model;
  Topology topo;
  FusionWeights weights;
};

LoadedConfig load_config(const std::string& path);
LoadedConfig parse_config(const std::string& json_text);

}  // namespace hcre
