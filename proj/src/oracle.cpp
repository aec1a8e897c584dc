#include "vigil/oracle.hpp"

#include <algorithm>
#include <optional>
#include <stdexcept>

namespace vigil::oracle {

namespace {

struct TickRecord {
  std::uint64_t t = 0;
  bool pir = false;
  std::optional<std::uint32_t> raw;  // valid reading, if any
  // filled in as the tick is processed:
  bool motion = false;
  std::optional<std::uint32_t> filtered;
  OccupancyState state_after = OccupancyState::Idle;
};

// Median as "sort a copy, take the lower middle". Recomputed fresh per call.
std::uint32_t sorted_median(std::vector<std::uint32_t> values) {
  std::sort(values.begin(), values.end());
  return values[(values.size() - 1) / 2];
}

}  // namespace

std::vector<DetectionEvent> run_trace_reference(const Trace& trace,
                                                const DetectorConfig& cfg,
                                                const ConditioningConfig& ccfg) {
  cfg.validate();
  ccfg.validate();

  std::vector<DetectionEvent> events;
  std::vector<TickRecord> ticks;
  ticks.reserve(trace.samples.size());

  // Interpreter registers. Everything windowed is recomputed from `ticks`.
  OccupancyState state = OccupancyState::Idle;
  std::uint64_t last_pir_high = 0;
  bool any_pir_high = false;
  std::uint64_t last_motion_tick = 0;
  std::uint64_t last_valid_reading = 0;
  bool any_valid_reading = false;
  std::vector<std::uint32_t> idle_quiet_values;  // grow-only; baseline reads the tail
  bool visit_had_seated = false;
  std::uint64_t stale_since = 0;
  bool stale_running = false;
  std::uint64_t exit_hold_since = 0;
  bool exit_hold_running = false;

  for (const auto& sample : trace.samples) {
    const std::uint64_t t = sample.t.t_ms;
    if (!ticks.empty() && t <= ticks.back().t) {
      throw std::invalid_argument("reference interpreter: samples out of order");
    }

    TickRecord rec;
    rec.t = t;
    rec.pir = sample.pir;
    if (sample.distance_valid && sample.distance_cm) rec.raw = *sample.distance_cm;

    // --- conditioning, recomputed the long way -------------------------
    if (rec.pir) {
      last_pir_high = t;
      any_pir_high = true;
    }
    rec.motion = any_pir_high && t - last_pir_high <= ccfg.pir_debounce_ms;
    if (rec.motion) last_motion_tick = t;
    const std::uint64_t ms_since_motion = rec.motion ? 0 : t - last_motion_tick;

    if (rec.raw) {
      last_valid_reading = t;
      any_valid_reading = true;
    }
    const std::uint64_t since_valid = any_valid_reading ? t - last_valid_reading : t;
    const bool lidar_stale = since_valid > ccfg.lidar_stale_ms;

    // Median of the last N valid readings, gathered by scanning backwards.
    std::optional<std::uint32_t> filtered;
    if (!lidar_stale) {
      std::vector<std::uint32_t> recent;
      if (rec.raw) recent.push_back(*rec.raw);
      for (auto it = ticks.rbegin(); it != ticks.rend() && recent.size() < ccfg.median_window_samples;
           ++it) {
        if (it->raw) recent.push_back(*it->raw);
      }
      if (!recent.empty()) filtered = sorted_median(recent);
    }
    rec.filtered = filtered;

    // Stability: gather every tick inside [t - window, t] plus the newest
    // tick at or before the window start (the value held entering it).
    bool stable = false;
    {
      std::vector<const TickRecord*> window;
      bool have_anchor = false;
      const TickRecord self{t, rec.pir, rec.raw, rec.motion, rec.filtered, state};
      window.push_back(&self);
      for (auto it = ticks.rbegin(); it != ticks.rend(); ++it) {
        window.push_back(&*it);
        if (it->t + ccfg.stability_window_ms <= t) {
          have_anchor = true;
          break;
        }
      }
      if (have_anchor) {
        stable = true;
        std::uint32_t lo = UINT32_MAX, hi = 0;
        for (const TickRecord* w : window) {
          if (!w->raw || !w->filtered) {
            stable = false;
            break;
          }
          lo = std::min(lo, *w->filtered);
          hi = std::max(hi, *w->filtered);
        }
        if (stable) stable = hi - lo <= ccfg.stability_band_cm;
      }
    }

    // --- detector bookkeeping ------------------------------------------
    if (state != OccupancyState::Alert) {
      if (lidar_stale) {
        if (!stale_running) {
          stale_running = true;
          stale_since = t;
        }
      } else {
        stale_running = false;
      }

      if (state == OccupancyState::Idle && !rec.motion && filtered && !lidar_stale) {
        idle_quiet_values.push_back(*filtered);
      }

      if (state == OccupancyState::Exited) {
        const bool held = !rec.motion && filtered && *filtered > cfg.exit_distance_cm;
        if (held) {
          if (!exit_hold_running) {
            exit_hold_running = true;
            exit_hold_since = t;
          }
        } else {
          exit_hold_running = false;
        }
      }
    }

    // Baseline: fresh median over the tail of the idle-quiet record.
    const std::size_t baseline_n = std::min<std::size_t>(idle_quiet_values.size(), Baseline::kWindow);
    const bool baseline_established = baseline_n >= Baseline::kMinSamples;
    std::uint32_t baseline_cm = 0;
    if (baseline_n > 0) {
      baseline_cm = sorted_median({idle_quiet_values.end() - static_cast<std::ptrdiff_t>(baseline_n),
                                   idle_quiet_values.end()});
    }

    // --- literal rule table, at most two hops per tick ------------------
    for (int hop = 0; hop < 2; ++hop) {
      OccupancyState to = state;
      TransitionReason why = TransitionReason::Reset;
      bool fired = false;
      const bool has_d = filtered.has_value();
      const std::uint32_t d = has_d ? *filtered : 0;
      const bool occupied = state == OccupancyState::Entered || state == OccupancyState::Seated ||
                            state == OccupancyState::StandingNear;

      if (state == OccupancyState::Alert) {
        break;
      } else if (state == OccupancyState::SensorFault) {
        if (!lidar_stale) {
          to = OccupancyState::Idle;
          why = TransitionReason::SensorRecovered;
          fired = true;
        }
      } else if (stale_running && t - stale_since >= cfg.sensor_fault_ms) {
        to = OccupancyState::SensorFault;
        why = TransitionReason::SensorStale;
        fired = true;
      } else if (occupied && rec.motion && has_d &&
                 d > std::max(cfg.exit_distance_cm + cfg.hysteresis_cm, cfg.entry_distance_cm)) {
        to = OccupancyState::Exited;
        why = TransitionReason::ExitRule;
        fired = true;
      } else if ((occupied || state == OccupancyState::Exited) && has_d && d > cfg.fall_distance_cm &&
                 ms_since_motion >= cfg.fall_suspect_ms) {
        to = OccupancyState::FallSuspected;
        why = TransitionReason::FallRule;
        fired = true;
      } else if ((state == OccupancyState::Entered || state == OccupancyState::StandingNear) && stable &&
                 has_d && d >= cfg.seated_min_cm && d <= cfg.seated_max_cm) {
        to = OccupancyState::Seated;
        why = TransitionReason::SeatedRule;
        fired = true;
      } else if (state == OccupancyState::Warning && rec.motion) {
        to = OccupancyState::Seated;
        why = TransitionReason::SeatedRule;
        fired = true;
      } else if ((state == OccupancyState::Entered || state == OccupancyState::Seated) && stable &&
                 has_d && d > cfg.seated_max_cm + cfg.hysteresis_cm && d <= cfg.exit_distance_cm &&
                 ms_since_motion < cfg.warning_ms) {
        to = OccupancyState::StandingNear;
        why = TransitionReason::StandingRule;
        fired = true;
      } else if ((state == OccupancyState::Idle || state == OccupancyState::Exited) && rec.motion &&
                 has_d && d < cfg.entry_distance_cm &&
                 (!baseline_established || d + cfg.entry_drop_cm < baseline_cm)) {
        to = OccupancyState::Entered;
        why = TransitionReason::EntryRule;
        fired = true;
      } else if (state == OccupancyState::FallSuspected && rec.motion && has_d &&
                 d < cfg.entry_distance_cm) {
        to = OccupancyState::Entered;
        why = TransitionReason::EntryRule;
        fired = true;
      } else if (state == OccupancyState::Seated && ms_since_motion >= cfg.warning_ms && has_d &&
                 d >= cfg.seated_min_cm && d <= cfg.seated_max_cm) {
        to = OccupancyState::Warning;
        why = TransitionReason::WarningTimer;
        fired = true;
      } else if ((state == OccupancyState::Warning || state == OccupancyState::FallSuspected) &&
                 ms_since_motion >= cfg.alert_ms) {
        to = OccupancyState::Alert;
        why = TransitionReason::AlertTimer;
        fired = true;
      } else if (state == OccupancyState::Exited && exit_hold_running &&
                 t - exit_hold_since >= cfg.exit_confirm_ms) {
        to = OccupancyState::Idle;
        why = visit_had_seated ? TransitionReason::ExitRule : TransitionReason::ShortVisitDiscard;
        fired = true;
      }

      if (!fired) break;

      events.push_back({MonotonicTime{t}, state, to, why});
      if (to == OccupancyState::Entered && state == OccupancyState::Idle) visit_had_seated = false;
      if (to == OccupancyState::Seated) visit_had_seated = true;
      if (to == OccupancyState::Idle) visit_had_seated = false;
      if (to == OccupancyState::Exited) exit_hold_running = false;
      state = to;
    }

    rec.state_after = state;
    ticks.push_back(std::move(rec));
  }
  return events;
}

Divergence compare_on_trace(const Trace& trace, const DetectorConfig& detector_cfg,
                            const ConditioningConfig& conditioning_cfg) {
  const auto expected = run_trace_reference(trace, detector_cfg, conditioning_cfg);
  const auto actual = run_trace(trace, detector_cfg, conditioning_cfg);

  Divergence div;
  const std::size_t n = std::min(expected.size(), actual.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (!(expected[i] == actual[i])) {
      div.diverged = true;
      div.index = i;
      div.description = "event " + std::to_string(i) + ": reference " + event_to_json(expected[i]) +
                        " vs pipeline " + event_to_json(actual[i]);
      return div;
    }
  }
  if (expected.size() != actual.size()) {
    div.diverged = true;
    div.index = n;
    const bool ref_longer = expected.size() > actual.size();
    const auto& extra = ref_longer ? expected[n] : actual[n];
    div.description = std::string("event ") + std::to_string(n) + ": " +
                      (ref_longer ? "reference has extra " : "pipeline has extra ") + event_to_json(extra);
    return div;
  }
  return div;
}

}  // namespace vigil::oracle
