#include "vigil/config_io.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace vigil {

namespace {

void load_detector(const nlohmann::json& j, DetectorConfig& cfg) {
  for (auto& [key, value] : j.items()) {
    if (key == "entry_distance_cm") cfg.entry_distance_cm = value.get<std::uint32_t>();
    else if (key == "seated_min_cm") cfg.seated_min_cm = value.get<std::uint32_t>();
    else if (key == "seated_max_cm") cfg.seated_max_cm = value.get<std::uint32_t>();
    else if (key == "exit_distance_cm") cfg.exit_distance_cm = value.get<std::uint32_t>();
    else if (key == "fall_distance_cm") cfg.fall_distance_cm = value.get<std::uint32_t>();
    else if (key == "fall_suspect_ms") cfg.fall_suspect_ms = value.get<std::uint64_t>();
    else if (key == "alert_ms") cfg.alert_ms = value.get<std::uint64_t>();
    else if (key == "warning_ms") cfg.warning_ms = value.get<std::uint64_t>();
    else if (key == "hysteresis_cm") cfg.hysteresis_cm = value.get<std::uint32_t>();
    else if (key == "entry_drop_cm") cfg.entry_drop_cm = value.get<std::uint32_t>();
    else if (key == "exit_confirm_ms") cfg.exit_confirm_ms = value.get<std::uint64_t>();
    else if (key == "sensor_fault_ms") cfg.sensor_fault_ms = value.get<std::uint64_t>();
    else throw std::invalid_argument("config: unknown detector field '" + key + "'");
  }
}

void load_conditioning(const nlohmann::json& j, ConditioningConfig& cfg) {
  for (auto& [key, value] : j.items()) {
    if (key == "pir_debounce_ms") cfg.pir_debounce_ms = value.get<std::uint32_t>();
    else if (key == "median_window_samples") cfg.median_window_samples = value.get<std::uint32_t>();
    else if (key == "stability_window_ms") cfg.stability_window_ms = value.get<std::uint32_t>();
    else if (key == "stability_band_cm") cfg.stability_band_cm = value.get<std::uint32_t>();
    else if (key == "lidar_stale_ms") cfg.lidar_stale_ms = value.get<std::uint32_t>();
    else throw std::invalid_argument("config: unknown conditioning field '" + key + "'");
  }
}

}  // namespace

PipelineConfig pipeline_config_from_json(const std::string& text) {
  nlohmann::json root;
  try {
    root = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("config json: ") + e.what());
  }
  if (!root.is_object()) throw std::invalid_argument("config json: top level must be an object");

  PipelineConfig cfg;
  for (auto& [key, value] : root.items()) {
    if (key == "detector") load_detector(value, cfg.detector);
    else if (key == "conditioning") load_conditioning(value, cfg.conditioning);
    else throw std::invalid_argument("config json: unknown section '" + key + "'");
  }
  cfg.detector.validate();
  cfg.conditioning.validate();
  return cfg;
}

std::string pipeline_config_to_json(const PipelineConfig& cfg) {
  nlohmann::ordered_json d;
  d["entry_distance_cm"] = cfg.detector.entry_distance_cm;
  d["seated_min_cm"] = cfg.detector.seated_min_cm;
  d["seated_max_cm"] = cfg.detector.seated_max_cm;
  d["exit_distance_cm"] = cfg.detector.exit_distance_cm;
  d["fall_distance_cm"] = cfg.detector.fall_distance_cm;
  d["fall_suspect_ms"] = cfg.detector.fall_suspect_ms;
  d["alert_ms"] = cfg.detector.alert_ms;
  d["warning_ms"] = cfg.detector.warning_ms;
  d["hysteresis_cm"] = cfg.detector.hysteresis_cm;
  d["entry_drop_cm"] = cfg.detector.entry_drop_cm;
  d["exit_confirm_ms"] = cfg.detector.exit_confirm_ms;
  d["sensor_fault_ms"] = cfg.detector.sensor_fault_ms;

  nlohmann::ordered_json c;
  c["pir_debounce_ms"] = cfg.conditioning.pir_debounce_ms;
  c["median_window_samples"] = cfg.conditioning.median_window_samples;
  c["stability_window_ms"] = cfg.conditioning.stability_window_ms;
  c["stability_band_cm"] = cfg.conditioning.stability_band_cm;
  c["lidar_stale_ms"] = cfg.conditioning.lidar_stale_ms;

  nlohmann::ordered_json root;
  root["detector"] = std::move(d);
  root["conditioning"] = std::move(c);
  return root.dump(2) + "\n";
}

PipelineConfig read_pipeline_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return pipeline_config_from_json(buf.str());
}

}  // namespace vigil
