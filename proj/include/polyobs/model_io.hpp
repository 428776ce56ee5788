#pragma once

#include <optional>
#include <string>

#include "polyobs/discretizer.hpp"
#include "polyobs/json_util.hpp"
#include "polyobs/polytopic_model.hpp"

namespace polyobs {

// A model document holds either a discrete system or a continuous one (flag
// "continuous": true) plus the parameter box the coordinate map is built
// from. Vertices must be listed in the order partition_box produces.
struct LoadedModel {
  std::optional<PolytopicDescriptorSystem> system;     // discrete form
  std::optional<ContinuousModel> continuous;           // continuous form
  CoordinateMap map;

  bool is_continuous() const { return continuous.has_value(); }
};

LoadedModel model_from_json(const json& j);
LoadedModel load_model(const std::string& path);

json model_to_json(const PolytopicDescriptorSystem& sys, const CoordinateMap& map);
void save_model(const std::string& path, const PolytopicDescriptorSystem& sys,
                const CoordinateMap& map);

}  // namespace polyobs
