#include "vigil/detector.hpp"

#include <algorithm>
#include <stdexcept>

namespace vigil {

std::string to_string(OccupancyState s) {
  switch (s) {
    case OccupancyState::Idle: return "IDLE";
    case OccupancyState::Entered: return "ENTERED";
    case OccupancyState::Seated: return "SEATED";
    case OccupancyState::StandingNear: return "STANDING_NEAR";
    case OccupancyState::Exited: return "EXITED";
    case OccupancyState::FallSuspected: return "FALL_SUSPECTED";
    case OccupancyState::Warning: return "WARNING";
    case OccupancyState::Alert: return "ALERT";
    case OccupancyState::SensorFault: return "SENSOR_FAULT";
  }
  return "?";
}

std::string to_string(TransitionReason r) {
  switch (r) {
    case TransitionReason::EntryRule: return "ENTRY_RULE";
    case TransitionReason::SeatedRule: return "SEATED_RULE";
    case TransitionReason::StandingRule: return "STANDING_RULE";
    case TransitionReason::ExitRule: return "EXIT_RULE";
    case TransitionReason::FallRule: return "FALL_RULE";
    case TransitionReason::WarningTimer: return "WARNING_TIMER";
    case TransitionReason::AlertTimer: return "ALERT_TIMER";
    case TransitionReason::ShortVisitDiscard: return "SHORT_VISIT_DISCARD";
    case TransitionReason::SensorStale: return "SENSOR_STALE";
    case TransitionReason::SensorRecovered: return "SENSOR_RECOVERED";
    case TransitionReason::Reset: return "RESET";
  }
  return "?";
}

std::optional<OccupancyState> occupancy_state_from_string(const std::string& name) {
  for (auto s : {OccupancyState::Idle, OccupancyState::Entered, OccupancyState::Seated,
                 OccupancyState::StandingNear, OccupancyState::Exited, OccupancyState::FallSuspected,
                 OccupancyState::Warning, OccupancyState::Alert, OccupancyState::SensorFault}) {
    if (to_string(s) == name) return s;
  }
  return std::nullopt;
}

std::optional<TransitionReason> transition_reason_from_string(const std::string& name) {
  for (auto r : {TransitionReason::EntryRule, TransitionReason::SeatedRule, TransitionReason::StandingRule,
                 TransitionReason::ExitRule, TransitionReason::FallRule, TransitionReason::WarningTimer,
                 TransitionReason::AlertTimer, TransitionReason::ShortVisitDiscard,
                 TransitionReason::SensorStale, TransitionReason::SensorRecovered, TransitionReason::Reset}) {
    if (to_string(r) == name) return r;
  }
  return std::nullopt;
}

std::string event_to_json(const DetectionEvent& ev) {
  return "{\"t_ms\":" + std::to_string(ev.t.t_ms) + ",\"from\":\"" + to_string(ev.from) +
         "\",\"to\":\"" + to_string(ev.to) + "\",\"reason\":\"" + to_string(ev.reason) + "\"}";
}

void DetectorConfig::validate() const {
  auto fail = [](const std::string& msg) { throw std::invalid_argument("detector config: " + msg); };
  if (!(seated_min_cm < seated_max_cm)) {
    fail("seated_min_cm (" + std::to_string(seated_min_cm) + ") must be < seated_max_cm (" +
         std::to_string(seated_max_cm) + ")");
  }
  if (!(seated_max_cm < exit_distance_cm)) {
    fail("seated_max_cm (" + std::to_string(seated_max_cm) + ") must be < exit_distance_cm (" +
         std::to_string(exit_distance_cm) + ")");
  }
  if (!(exit_distance_cm <= fall_distance_cm)) {
    fail("exit_distance_cm (" + std::to_string(exit_distance_cm) + ") must be <= fall_distance_cm (" +
         std::to_string(fall_distance_cm) + ")");
  }
  if (!(warning_ms < alert_ms)) {
    fail("warning_ms (" + std::to_string(warning_ms) + ") must be < alert_ms (" +
         std::to_string(alert_ms) + ")");
  }
  if (!(fall_suspect_ms < alert_ms)) {
    fail("fall_suspect_ms (" + std::to_string(fall_suspect_ms) + ") must be < alert_ms (" +
         std::to_string(alert_ms) + ")");
  }
  if (fall_suspect_ms == 0) fail("fall_suspect_ms must be > 0");
  if (warning_ms == 0) fail("warning_ms must be > 0");
  if (exit_confirm_ms == 0) fail("exit_confirm_ms must be > 0");
  if (sensor_fault_ms == 0) fail("sensor_fault_ms must be > 0");
}

void Baseline::add(std::uint32_t distance_cm) {
  window_.push_back(distance_cm);
  while (window_.size() > kWindow) window_.pop_front();
}

void Baseline::clear() { window_.clear(); }

std::uint32_t Baseline::empty_room_cm() const {
  std::vector<std::uint32_t> scratch(window_.begin(), window_.end());
  auto mid = scratch.begin() + static_cast<std::ptrdiff_t>((scratch.size() - 1) / 2);
  std::nth_element(scratch.begin(), mid, scratch.end());
  return *mid;
}

Detector::Detector(DetectorConfig cfg) : cfg_(cfg) { cfg_.validate(); }

std::optional<Detector::Pending> Detector::next_transition(const ConditionedSample& cs) const {
  using S = OccupancyState;
  using R = TransitionReason;

  if (state_ == S::Alert) return std::nullopt;  // latched until reset

  if (state_ == S::SensorFault) {
    if (!cs.lidar_stale) return Pending{S::Idle, R::SensorRecovered};
    return std::nullopt;
  }

  const bool has_d = cs.distance_cm.has_value();
  const std::uint32_t d = has_d ? *cs.distance_cm : 0;

  // Sensor fault outranks everything else.
  if (stale_since_ && ms_since(*stale_since_, cs.t) >= cfg_.sensor_fault_ms) {
    return Pending{S::SensorFault, R::SensorStale};
  }

  const bool occupied =
      state_ == S::Entered || state_ == S::Seated || state_ == S::StandingNear;

  // The exit reading must also clear the entry zone: with the default bands
  // the two overlap in (exit+hyst, entry), where a moving person would
  // otherwise satisfy entry and exit at once and oscillate.
  const std::uint32_t exit_clearance_cm =
      std::max(cfg_.exit_distance_cm + cfg_.hysteresis_cm, cfg_.entry_distance_cm);

  if (occupied && cs.motion && has_d && d > exit_clearance_cm) {
    return Pending{S::Exited, R::ExitRule};
  }

  if ((occupied || state_ == S::Exited) && has_d && d > cfg_.fall_distance_cm &&
      cs.ms_since_motion >= cfg_.fall_suspect_ms) {
    return Pending{S::FallSuspected, R::FallRule};
  }

  const bool in_seated_band = has_d && d >= cfg_.seated_min_cm && d <= cfg_.seated_max_cm;

  if ((state_ == S::Entered || state_ == S::StandingNear) && cs.stable && in_seated_band) {
    return Pending{S::Seated, R::SeatedRule};
  }
  if (state_ == S::Warning && cs.motion) {
    return Pending{S::Seated, R::SeatedRule};  // de-escalation
  }

  if ((state_ == S::Entered || state_ == S::Seated) && cs.stable && has_d &&
      d > cfg_.seated_max_cm + cfg_.hysteresis_cm && d <= cfg_.exit_distance_cm &&
      cs.ms_since_motion < cfg_.warning_ms) {
    return Pending{S::StandingNear, R::StandingRule};
  }

  // Entry: absolute threshold plus, once a baseline exists, a real drop
  // below the empty-room level.
  const bool entry_fires = cs.motion && has_d && d < cfg_.entry_distance_cm &&
                           (!baseline_.established() || d + cfg_.entry_drop_cm < baseline_.empty_room_cm());
  if ((state_ == S::Idle || state_ == S::Exited) && entry_fires) {
    return Pending{S::Entered, R::EntryRule};
  }
  if (state_ == S::FallSuspected && cs.motion && has_d && d < cfg_.entry_distance_cm) {
    return Pending{S::Entered, R::EntryRule};  // recovery
  }

  if (state_ == S::Seated && cs.ms_since_motion >= cfg_.warning_ms && in_seated_band) {
    return Pending{S::Warning, R::WarningTimer};
  }
  if ((state_ == S::Warning || state_ == S::FallSuspected) && cs.ms_since_motion >= cfg_.alert_ms) {
    return Pending{S::Alert, R::AlertTimer};
  }
  if (state_ == S::Exited && exit_hold_since_ &&
      ms_since(*exit_hold_since_, cs.t) >= cfg_.exit_confirm_ms) {
    return Pending{S::Idle, visit_had_seated_ ? R::ExitRule : R::ShortVisitDiscard};
  }
  return std::nullopt;
}

void Detector::apply(OccupancyState from, OccupancyState to) {
  state_ = to;
  switch (to) {
    case OccupancyState::Entered:
      if (from == OccupancyState::Idle) visit_had_seated_ = false;
      break;
    case OccupancyState::Seated:
      visit_had_seated_ = true;
      break;
    case OccupancyState::Exited:
      exit_hold_since_.reset();
      break;
    case OccupancyState::Idle:
      visit_had_seated_ = false;
      break;
    default:
      break;
  }
}

std::vector<DetectionEvent> Detector::step(const ConditionedSample& cs) {
  if (last_t_ && cs.t <= *last_t_) {
    throw std::invalid_argument("conditioned sample at " + std::to_string(cs.t.t_ms) +
                                "ms not after previous at " + std::to_string(last_t_->t_ms) + "ms");
  }
  last_t_ = cs.t;

  std::vector<DetectionEvent> events;
  if (state_ == OccupancyState::Alert) return events;  // latched

  if (cs.lidar_stale) {
    if (!stale_since_) stale_since_ = cs.t;
  } else {
    stale_since_.reset();
  }

  if (state_ == OccupancyState::Idle && !cs.motion && cs.distance_cm && !cs.lidar_stale) {
    baseline_.add(*cs.distance_cm);
  }

  if (state_ == OccupancyState::Exited) {
    const bool held = !cs.motion && cs.distance_cm && *cs.distance_cm > cfg_.exit_distance_cm;
    if (held) {
      if (!exit_hold_since_) exit_hold_since_ = cs.t;
    } else {
      exit_hold_since_.reset();
    }
  }

  // A tick may chain two transitions (e.g. a fall crossing straight into the
  // alert window) but never more, so intermediate states are always emitted.
  for (int hops = 0; hops < 2; ++hops) {
    auto pending = next_transition(cs);
    if (!pending) break;
    DetectionEvent ev{cs.t, state_, pending->to, pending->reason};
    apply(state_, pending->to);
    events.push_back(ev);
  }
  return events;
}

std::optional<DetectionEvent> Detector::force_reset(MonotonicTime t) {
  stale_since_.reset();
  exit_hold_since_.reset();
  visit_had_seated_ = false;
  baseline_.clear();
  last_t_ = t;
  if (state_ == OccupancyState::Idle) return std::nullopt;
  DetectionEvent ev{t, state_, OccupancyState::Idle, TransitionReason::Reset};
  state_ = OccupancyState::Idle;
  return ev;
}

std::vector<DetectionEvent> run_trace(const Trace& trace, const DetectorConfig& detector_cfg,
                                      const ConditioningConfig& conditioning_cfg) {
  auto report = validate_trace(trace);
  if (!report.clean()) {
    const auto& first = report.errors.front();
    throw std::invalid_argument("trace invalid (sample " + std::to_string(first.index) +
                                "): " + first.detail);
  }
  Conditioner conditioner(conditioning_cfg);
  Detector detector(detector_cfg);
  std::vector<DetectionEvent> events;
  for (const auto& sample : trace.samples) {
    auto stepped = detector.step(conditioner.step(sample));
    events.insert(events.end(), stepped.begin(), stepped.end());
  }
  return events;
}

}  // namespace vigil
