#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "exlgm/evt.hpp"
#include "exlgm/mesh.hpp"
#include "exlgm/posterior.hpp"
#include "exlgm/priors.hpp"
#include "exlgm/simulate.hpp"
#include "exlgm/smoother.hpp"

namespace exlgm {

struct MeshConfig {
  double spacing = 0.0;
  std::optional<double> margin;       ///< default: 2 * spacing
  std::optional<BoundingBox> bbox;    ///< default: bounding box of the sites

  double margin_or_default() const { return margin.value_or(2.0 * spacing); }
};

struct SimulateGridConfig {
  int nx = 0;
  int ny = 0;
  double spacing = 1.0;
  double origin_x = 0.0;
  double origin_y = 0.0;
};

struct SimulateConfig {
  enum class Mode { fixed, generative };
  Mode mode = Mode::fixed;
  SimulateGridConfig grid;
  std::int64_t T = 0;
  double block_size = 365.25;
  std::uint64_t seed = 0;
  std::optional<PPParameters> fixed;          ///< required in fixed mode
  std::optional<GenerativeTruth> generative;  ///< required in generative mode
};

/// One JSON document drives every subcommand; unknown keys are rejected.
struct RunConfig {
  double threshold_quantile = 0.75;
  std::optional<double> n_block;  ///< required by maxfit
  int min_exceedances = 15;
  std::optional<MeshConfig> mesh;     ///< required by smooth and generative simulate
  std::optional<PriorConfig> priors;  ///< default: rates calibrated from the domain diameter
  ChainConfig chain;
  std::vector<double> return_periods = {20.0, 50.0, 100.0};
  PredictConfig predict;
  std::optional<SimulateConfig> simulate;
  std::map<std::string, std::string> paths;  ///< optional default file locations

  std::string path_or(const std::string& key, const std::string& fallback) const {
    auto it = paths.find(key);
    return it == paths.end() ? fallback : it->second;
  }
};

RunConfig load_config(const std::string& path);
RunConfig parse_config(const std::string& json_text, const std::string& origin);

}  // namespace exlgm
