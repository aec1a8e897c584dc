#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <string>
#include <vector>

#include "vigil/conditioning.hpp"
#include "vigil/trace.hpp"

namespace vigil {

enum class OccupancyState {
  Idle,
  Entered,
  Seated,
  StandingNear,
  Exited,
  FallSuspected,
  Warning,
  Alert,
  SensorFault,
};

enum class TransitionReason {
  EntryRule,
  SeatedRule,
  StandingRule,
  ExitRule,
  FallRule,
  WarningTimer,
  AlertTimer,
  ShortVisitDiscard,
  SensorStale,
  SensorRecovered,
  Reset,
};

// UPPER_SNAKE_CASE names, as used in the event stream and annotated exports.
std::string to_string(OccupancyState s);
std::string to_string(TransitionReason r);
std::optional<OccupancyState> occupancy_state_from_string(const std::string& name);
std::optional<TransitionReason> transition_reason_from_string(const std::string& name);

/// Every threshold and timer the rules consume. Distances in cm, durations
/// in ms.
struct DetectorConfig {
  std::uint32_t entry_distance_cm = 150;   // entry fires below this
  std::uint32_t seated_min_cm = 30;        // seated band, closed interval
  std::uint32_t seated_max_cm = 80;
  std::uint32_t exit_distance_cm = 130;    // exit fires above this (+ hysteresis)
  std::uint32_t fall_distance_cm = 150;    // fall suspicion needs distance beyond this
  std::uint64_t fall_suspect_ms = 180000;  // motionless time before suspecting a fall
  std::uint64_t alert_ms = 600000;         // motionless time before alerting
  std::uint64_t warning_ms = 300000;       // motionless time before warning (seated)
  std::uint32_t hysteresis_cm = 5;         // margin on the seated/exit boundaries
  std::uint32_t entry_drop_cm = 20;        // required drop below the empty-room baseline
  std::uint64_t exit_confirm_ms = 10000;   // quiet time before an exit becomes idle
  std::uint64_t sensor_fault_ms = 5000;    // sustained staleness before faulting

  /// Throws std::invalid_argument naming the first violated constraint.
  void validate() const;
};

/// One state transition, with the rule that caused it. Events within one
/// trace never decrease in time; at most two may share a tick, and then the
/// second's `from` equals the first's `to`.
struct DetectionEvent {
  MonotonicTime t;
  OccupancyState from = OccupancyState::Idle;
  OccupancyState to = OccupancyState::Idle;
  TransitionReason reason = TransitionReason::Reset;

  bool operator==(const DetectionEvent&) const = default;
};

/// JSON Lines form: {"t_ms":<int>,"from":"<state>","to":"<state>","reason":"<reason>"}
std::string event_to_json(const DetectionEvent& ev);

/// Rolling median of the distance while the room is idle and quiet; the
/// reference level the entry drop test compares against.
class Baseline {
 public:
  void add(std::uint32_t distance_cm);
  void clear();
  bool established() const { return window_.size() >= kMinSamples; }
  std::uint32_t empty_room_cm() const;  // requires established()
  std::size_t sample_count() const { return window_.size(); }

  static constexpr std::size_t kWindow = 64;
  static constexpr std::size_t kMinSamples = 20;

 private:
  std::deque<std::uint32_t> window_;
};

/// The occupancy state machine. Feed conditioned samples in time order;
/// each step applies the rule table below and returns the transitions it
/// caused (at most two per tick).
///
///   Idle          -> Entered       motion, distance below entry threshold and
///                                  entry_drop_cm under the baseline (drop test
///                                  skipped until a baseline exists)
///   Entered/StandingNear -> Seated    stable inside [seated_min, seated_max]
///   Entered/Seated -> StandingNear    stable inside (seated_max+hyst, exit],
///                                  motion seen within warning_ms
///   Seated        -> Warning       motionless warning_ms, still in band
///   Warning       -> Seated        any motion (de-escalation)
///   Warning       -> Alert         motionless alert_ms
///   Entered/Seated/StandingNear -> Exited   motion, distance above
///                                  max(exit+hyst, entry): the reading must
///                                  clear the entry zone too, or entry and
///                                  exit would both enable in the overlap
///   Exited        -> Idle          quiet and far for exit_confirm_ms
///   Exited        -> Entered       entry rule fires again (re-entry)
///   Entered/Seated/StandingNear/Exited -> FallSuspected
///                                  distance above fall threshold, motionless
///                                  fall_suspect_ms
///   FallSuspected -> Alert         motionless alert_ms
///   FallSuspected -> Entered       motion near the sensor again (recovery)
///   any non-latched -> SensorFault stale rangefinder sustained sensor_fault_ms
///   SensorFault   -> Idle          first fresh reading
///
/// Alert latches: nothing but force_reset() leaves it. When several rules
/// enable at once they are tried in a fixed order (sensor fault, exit, fall,
/// seated, standing, entry, timers), which makes event streams deterministic.
class Detector {
 public:
  explicit Detector(DetectorConfig cfg);

  std::vector<DetectionEvent> step(const ConditionedSample& cs);

  /// Operator reset: back to Idle, timers zeroed, baseline dropped. Emits
  /// the RESET transition unless already Idle.
  std::optional<DetectionEvent> force_reset(MonotonicTime t);

  OccupancyState state() const { return state_; }
  const Baseline& baseline() const { return baseline_; }
  const DetectorConfig& config() const { return cfg_; }

 private:
  struct Pending {
    OccupancyState to;
    TransitionReason reason;
  };
  std::optional<Pending> next_transition(const ConditionedSample& cs) const;
  void apply(OccupancyState from, OccupancyState to);

  DetectorConfig cfg_;
  OccupancyState state_ = OccupancyState::Idle;
  Baseline baseline_;
  std::optional<MonotonicTime> last_t_;
  std::optional<MonotonicTime> stale_since_;
  std::optional<MonotonicTime> exit_hold_since_;
  bool visit_had_seated_ = false;
};

/// Batch driver: validate, condition, detect. Pure function of its inputs.
/// Throws std::invalid_argument if the trace fails validation.
std::vector<DetectionEvent> run_trace(const Trace& trace, const DetectorConfig& detector_cfg,
                                      const ConditioningConfig& conditioning_cfg);

}  // namespace vigil
