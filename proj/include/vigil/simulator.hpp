#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "vigil/trace.hpp"

namespace vigil {

/// Piecewise behavior script: each segment pins a distance profile and a
/// movement pattern for its duration. Knife-edge changes between segments
/// are intentional (a person leaving the beam is a step, not a ramp).
struct Segment {
  enum class DistanceKind { Constant, LinearRamp, Absent };
  enum class MovementKind { None, Continuous, Sporadic };

  std::uint64_t duration_ms = 0;
  DistanceKind distance = DistanceKind::Constant;
  std::uint32_t cm = 0;       // Constant
  std::uint32_t from_cm = 0;  // LinearRamp
  std::uint32_t to_cm = 0;
  MovementKind movement = MovementKind::None;
  double rate_per_min = 0.0;  // Sporadic pulse rate
  std::string label;
};

struct ScenarioScript {
  std::vector<Segment> segments;

  std::uint64_t total_duration_ms() const;
  /// Throws std::invalid_argument naming the offending segment.
  void validate() const;
};

struct NoiseModel {
  double distance_sigma_cm = 2.0;
  double dropout_prob = 0.0;
  double pir_false_high_prob = 0.0;
  std::uint32_t timing_jitter_ms = 0;  // uniform +/- on each tick
  std::uint64_t rng_seed = 1;

  void validate(std::uint32_t period_ms) const;

  static NoiseModel none(std::uint64_t seed = 1) {
    return NoiseModel{0.0, 0.0, 0.0, 0, seed};
  }
};

struct SynthesisResult {
  Trace trace;
  /// Noisy readings pushed outside the sensor window get pinned to its edge;
  /// the count is surfaced here (and in run manifests) instead of resampling.
  std::uint64_t truncated_samples = 0;
};

/// Renders a script into a sample trace. Deterministic for a given
/// (script, noise, period): same inputs, identical bytes out.
SynthesisResult synthesize(const ScenarioScript& script, const NoiseModel& noise,
                           std::uint32_t period_ms = 50);

enum class BuiltinScenario { Exp1, Exp2, Exp3, Exp4, Exp5 };

/// Canonical behavior scripts:
///   EXP1  walk in, sit ~90s, brisk exit
///   EXP2  walk in, sit motionless for 11 minutes
///   EXP3  brief 20s visit, no sitting
///   EXP4  sit, then slide out of the beam and lie still
///   EXP5  collapse right after entering
ScenarioScript builtin_scenario(BuiltinScenario id);
std::string to_string(BuiltinScenario id);
/// Accepts the ids EXP1..EXP5.
std::optional<BuiltinScenario> builtin_scenario_from_string(const std::string& name);

/// Seeded scenario generator covering the behavior classes the detector
/// distinguishes (visit lengths, falls, re-entries, outages, readings that
/// hug the rule thresholds). Same seed, same script.
ScenarioScript random_scenario(std::uint64_t seed);

/// Scenario JSON round-trip. Schema: {"period_ms":..,"segments":[{
/// "duration_ms":..,"distance":{"kind":..,"cm"|"from_cm","to_cm":..},
/// "movement":{"kind":..,"rate_per_min"?:..},"label":..}],"noise":{..}}.
struct ScenarioFile {
  ScenarioScript script;
  NoiseModel noise;
  std::uint32_t period_ms = 50;
};
std::string scenario_to_json(const ScenarioFile& f);
ScenarioFile scenario_from_json(const std::string& text);
ScenarioFile read_scenario_file(const std::string& path);
void write_scenario_file(const ScenarioFile& f, const std::string& path);

}  // namespace vigil
