#pragma once

#include <cstdint>
#include <deque>
#include <optional>

#include "vigil/trace.hpp"

namespace vigil {

struct ConditioningConfig {
  /// Debounced motion stays true this long past the last PIR HIGH sample,
  /// mirroring the sensor's own retrigger hold.
  std::uint32_t pir_debounce_ms = 200;
  /// Median filter span, in valid readings. Odd, >= 1.
  std::uint32_t median_window_samples = 5;
  /// Distance counts as stable once it has been present for this long with
  /// total spread no wider than stability_band_cm.
  std::uint32_t stability_window_ms = 3000;
  std::uint32_t stability_band_cm = 10;
  /// No valid reading for longer than this marks the rangefinder stale.
  std::uint32_t lidar_stale_ms = 500;

  /// Throws std::invalid_argument naming the first violated constraint.
  void validate() const;
};

/// A raw sample with the rule operands attached: debounced motion, median
/// distance, the stability predicate, and the time since motion was last
/// seen. All values derive from sample timestamps only.
struct ConditionedSample {
  MonotonicTime t;
  bool motion = false;
  /// Median of the most recent valid readings; absent until the first valid
  /// reading arrives and whenever the sensor is stale.
  std::optional<std::uint32_t> distance_cm;
  bool stable = false;
  /// 0 whenever motion is true. Before any motion, counts from stream start.
  std::uint64_t ms_since_motion = 0;
  bool lidar_stale = false;
};

/// Streaming accumulator turning raw samples into conditioned ones.
/// Single-owner; samples must arrive in strictly increasing time order or
/// step() throws.
class Conditioner {
 public:
  explicit Conditioner(ConditioningConfig cfg);

  ConditionedSample step(const SensorSample& sample);

  const ConditioningConfig& config() const { return cfg_; }

 private:
  // A tick in the stability window: time, and the conditioned distance at
  // that tick if the raw reading was usable.
  struct StabilityEntry {
    MonotonicTime t;
    std::optional<std::uint32_t> value;
  };

  std::optional<std::uint32_t> median() const;

  ConditioningConfig cfg_;
  std::optional<MonotonicTime> last_t_;
  std::optional<MonotonicTime> last_pir_high_;
  std::optional<MonotonicTime> last_motion_tick_;
  std::optional<MonotonicTime> last_valid_reading_;
  std::deque<std::uint32_t> median_window_;
  // Front entry doubles as the coverage anchor: the newest tick at or before
  // the window start, proving the signal existed that far back.
  std::deque<StabilityEntry> stability_window_;
};

}  // namespace vigil
