#include "vigil/manifest.hpp"

#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace vigil {

std::string manifest_to_json(const RunManifest& m) {
  nlohmann::ordered_json root;
  root["tool"] = "vigil";
  root["version"] = kToolVersion;
  root["command"] = m.command;
  root["config"] = nlohmann::ordered_json::parse(pipeline_config_to_json(m.config));
  if (m.noise) {
    nlohmann::ordered_json n;
    n["distance_sigma_cm"] = m.noise->distance_sigma_cm;
    n["dropout_prob"] = m.noise->dropout_prob;
    n["pir_false_high_prob"] = m.noise->pir_false_high_prob;
    n["timing_jitter_ms"] = m.noise->timing_jitter_ms;
    n["rng_seed"] = m.noise->rng_seed;
    root["noise"] = std::move(n);
  }
  if (m.period_ms) root["period_ms"] = *m.period_ms;
  if (m.truncated_samples) root["truncated_samples"] = *m.truncated_samples;
  root["inputs"] = m.inputs;
  root["outputs"] = m.outputs;
  return root.dump(2) + "\n";
}

void write_manifest(const RunManifest& m, const std::string& out_path) {
  const std::string path = out_path + ".manifest.json";
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  const std::string text = manifest_to_json(m);
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace vigil
