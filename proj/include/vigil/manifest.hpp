#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>

#include "vigil/config_io.hpp"
#include "vigil/simulator.hpp"

namespace vigil {

inline constexpr const char* kToolVersion = "0.1.0";

/// Everything needed to reproduce a run bit-for-bit: the exact settings,
/// seed, and digests of every file read or written. Contains no wall-clock
/// data, so re-running a command regenerates the manifest byte-identically.
struct RunManifest {
  std::string command;
  PipelineConfig config;
  std::optional<NoiseModel> noise;
  std::optional<std::uint32_t> period_ms;
  std::optional<std::uint64_t> truncated_samples;
  std::map<std::string, std::string> inputs;   // path -> sha256
  std::map<std::string, std::string> outputs;  // path -> sha256
};

std::string manifest_to_json(const RunManifest& m);
/// Writes `<out_path>.manifest.json` next to the artifact it describes.
void write_manifest(const RunManifest& m, const std::string& out_path);

}  // namespace vigil
