#include "vigil/conditioning.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>
#include <vector>

namespace vigil {

void ConditioningConfig::validate() const {
  if (median_window_samples < 1 || median_window_samples % 2 == 0) {
    throw std::invalid_argument("median_window_samples (" + std::to_string(median_window_samples) +
                                ") must be odd and >= 1");
  }
  if (pir_debounce_ms == 0) throw std::invalid_argument("pir_debounce_ms must be > 0");
  if (stability_window_ms == 0) throw std::invalid_argument("stability_window_ms must be > 0");
  if (lidar_stale_ms == 0) throw std::invalid_argument("lidar_stale_ms must be > 0");
}

Conditioner::Conditioner(ConditioningConfig cfg) : cfg_(cfg) { cfg_.validate(); }

std::optional<std::uint32_t> Conditioner::median() const {
  if (median_window_.empty()) return std::nullopt;
  std::vector<std::uint32_t> scratch(median_window_.begin(), median_window_.end());
  auto mid = scratch.begin() + static_cast<std::ptrdiff_t>((scratch.size() - 1) / 2);
  std::nth_element(scratch.begin(), mid, scratch.end());
  return *mid;  // always one of the inputs, never an invented value
}

ConditionedSample Conditioner::step(const SensorSample& sample) {
  if (last_t_ && sample.t <= *last_t_) {
    throw std::invalid_argument("sample at " + std::to_string(sample.t.t_ms) +
                                "ms not after previous sample at " + std::to_string(last_t_->t_ms) + "ms");
  }
  last_t_ = sample.t;

  ConditionedSample out;
  out.t = sample.t;

  // Debounced motion and the motion clock.
  if (sample.pir) last_pir_high_ = sample.t;
  out.motion = last_pir_high_ && ms_since(*last_pir_high_, sample.t) <= cfg_.pir_debounce_ms;
  if (out.motion) last_motion_tick_ = sample.t;
  out.ms_since_motion =
      last_motion_tick_ ? ms_since(*last_motion_tick_, sample.t) : sample.t.t_ms;

  // Median filter over valid readings only; untrusted readings never enter.
  const bool raw_usable = sample.distance_valid && sample.distance_cm.has_value();
  if (raw_usable) {
    last_valid_reading_ = sample.t;
    median_window_.push_back(*sample.distance_cm);
    while (median_window_.size() > cfg_.median_window_samples) median_window_.pop_front();
  }
  const std::uint64_t since_valid =
      last_valid_reading_ ? ms_since(*last_valid_reading_, sample.t) : sample.t.t_ms;
  out.lidar_stale = since_valid > cfg_.lidar_stale_ms;
  if (!out.lidar_stale) out.distance_cm = median();

  // Stability: over the trailing window the signal must have been present at
  // every tick and the filtered value must have stayed within the band.
  stability_window_.push_back({sample.t, raw_usable ? out.distance_cm : std::nullopt});
  while (stability_window_.size() >= 2 &&
         stability_window_[1].t.t_ms + cfg_.stability_window_ms <= sample.t.t_ms) {
    stability_window_.pop_front();
  }
  const bool covered =
      stability_window_.front().t.t_ms + cfg_.stability_window_ms <= sample.t.t_ms;
  if (covered) {
    std::uint32_t lo = UINT32_MAX, hi = 0;
    bool all_present = true;
    for (const auto& e : stability_window_) {
      if (!e.value) {
        all_present = false;
        break;
      }
      lo = std::min(lo, *e.value);
      hi = std::max(hi, *e.value);
    }
    out.stable = all_present && hi - lo <= cfg_.stability_band_cm;
  }
  return out;
}

}  // namespace vigil
