#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace vigil {

/// Milliseconds since the start of a sample stream. All timing in the
/// pipeline is derived from these stamps; nothing ever consults the host
/// wall clock, so replaying a trace is bit-identical to having observed it
/// live.
struct MonotonicTime {
  std::uint64_t t_ms = 0;

  auto operator<=>(const MonotonicTime&) const = default;
};

/// later - earlier, in ms. Caller guarantees later >= earlier.
inline std::uint64_t ms_since(MonotonicTime earlier, MonotonicTime later) {
  return later.t_ms - earlier.t_ms;
}

/// One fused observation: PIR level plus the LiDAR distance, if any.
///
/// distance_valid=false with a present value records an out-of-range or
/// otherwise untrusted reading verbatim; readings are never clamped into
/// range. A missing value (nullopt) is a dropped/corrupt frame.
struct SensorSample {
  MonotonicTime t;
  bool pir = false;
  std::optional<std::uint32_t> distance_cm;
  bool distance_valid = false;
};

// Usable LiDAR reading window, cm (0.2-8m rangefinder).
inline constexpr std::uint32_t kDistanceMinCm = 20;
inline constexpr std::uint32_t kDistanceMaxCm = 800;

struct Trace {
  std::vector<SensorSample> samples;
  std::uint32_t nominal_period_ms = 50;
};

/// One finding from validate_trace. `index` is the offending sample.
struct TraceIssue {
  enum class Kind { Ordering, Range, Gap };
  Kind kind;
  std::size_t index = 0;
  std::string detail;
};

/// Ordering and range findings break the trace contract; gaps are legal
/// (the stream really did stall) but are surfaced so downstream stages and
/// operators can see them. Gaps are never filled in.
struct ValidationReport {
  std::vector<TraceIssue> errors;  // ordering + range
  std::vector<TraceIssue> gaps;

  bool clean() const { return errors.empty(); }
  bool empty() const { return errors.empty() && gaps.empty(); }
};

/// Pure scan over the trace. A delta within nominal_period_ms +/- 20% is a
/// regular step; anything longer is reported as a gap.
ValidationReport validate_trace(const Trace& trace);

/// CSV round-trip. Layout: header `t_ms,pir,distance_cm,valid`, one row per
/// sample, pir/valid in {0,1}, distance_cm empty when the reading is
/// missing. UTF-8, LF endings.
std::string trace_to_csv(const Trace& trace);
Trace trace_from_csv(const std::string& text, std::uint32_t nominal_period_ms = 50);

void write_trace_file(const Trace& trace, const std::string& path);
Trace read_trace_file(const std::string& path, std::uint32_t nominal_period_ms = 50);

}  // namespace vigil
