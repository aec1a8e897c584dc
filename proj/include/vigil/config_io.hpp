#pragma once

#include <string>

#include "vigil/conditioning.hpp"
#include "vigil/detector.hpp"

namespace vigil {

/// Detector + conditioning settings as one JSON document:
/// {"detector":{...},"conditioning":{...}} with fields named exactly after
/// the config structs. Both sections and every field are optional; omitted
/// fields keep their defaults. Unknown fields are rejected.
struct PipelineConfig {
  DetectorConfig detector;
  ConditioningConfig conditioning;
};

PipelineConfig pipeline_config_from_json(const std::string& text);
std::string pipeline_config_to_json(const PipelineConfig& cfg);
PipelineConfig read_pipeline_config(const std::string& path);

}  // namespace vigil
