#pragma once

#include <vector>

#include "vigil/conditioning.hpp"
#include "vigil/detector.hpp"
#include "vigil/trace.hpp"

namespace vigil::oracle {

/// Deliberately naive reference interpreter used to cross-check the
/// streaming pipeline. At every tick it recomputes each window statistic
/// (debounce, median, stability spread, idle baseline) from its per-tick
/// records rather than maintaining them incrementally, then walks a literal
/// rule table. Slow on purpose; shares no code with Conditioner/Detector.
std::vector<DetectionEvent> run_trace_reference(const Trace& trace,
                                                const DetectorConfig& detector_cfg,
                                                const ConditioningConfig& conditioning_cfg);

struct Divergence {
  bool diverged = false;
  std::size_t index = 0;     // first differing event position
  std::string description;
};

/// Compares the streaming pipeline with the reference interpreter on one
/// trace. Diverging event lists are described event-by-event.
Divergence compare_on_trace(const Trace& trace, const DetectorConfig& detector_cfg,
                            const ConditioningConfig& conditioning_cfg);

}  // namespace vigil::oracle
