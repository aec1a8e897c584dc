#include "vigil/simulator.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "vigil/rng.hpp"

#include <json.hpp>

namespace vigil {

std::uint64_t ScenarioScript::total_duration_ms() const {
  std::uint64_t total = 0;
  for (const auto& seg : segments) total += seg.duration_ms;
  return total;
}

void ScenarioScript::validate() const {
  if (segments.empty()) throw std::invalid_argument("scenario: no segments");
  for (std::size_t i = 0; i < segments.size(); ++i) {
    const auto& seg = segments[i];
    auto fail = [&](const std::string& msg) {
      throw std::invalid_argument("scenario segment " + std::to_string(i) +
                                  (seg.label.empty() ? "" : " ('" + seg.label + "')") + ": " + msg);
    };
    if (seg.duration_ms == 0) fail("duration_ms must be > 0");
    auto check_cm = [&](std::uint32_t v, const char* what) {
      if (v < kDistanceMinCm || v > kDistanceMaxCm) {
        fail(std::string(what) + " " + std::to_string(v) + "cm outside sensor window");
      }
    };
    switch (seg.distance) {
      case Segment::DistanceKind::Constant: check_cm(seg.cm, "cm"); break;
      case Segment::DistanceKind::LinearRamp:
        check_cm(seg.from_cm, "from_cm");
        check_cm(seg.to_cm, "to_cm");
        break;
      case Segment::DistanceKind::Absent: break;
    }
    if (seg.movement == Segment::MovementKind::Sporadic && seg.rate_per_min <= 0.0) {
      fail("sporadic movement needs rate_per_min > 0");
    }
  }
}

void NoiseModel::validate(std::uint32_t period_ms) const {
  if (distance_sigma_cm < 0.0) throw std::invalid_argument("noise: distance_sigma_cm must be >= 0");
  auto check_prob = [](double p, const char* what) {
    if (p < 0.0 || p > 1.0) throw std::invalid_argument(std::string("noise: ") + what + " must be in [0,1]");
  };
  check_prob(dropout_prob, "dropout_prob");
  check_prob(pir_false_high_prob, "pir_false_high_prob");
  if (2ull * timing_jitter_ms >= period_ms) {
    throw std::invalid_argument("noise: timing_jitter_ms must stay below half the sample period");
  }
}

SynthesisResult synthesize(const ScenarioScript& script, const NoiseModel& noise,
                           std::uint32_t period_ms) {
  if (period_ms == 0) throw std::invalid_argument("period_ms must be > 0");
  script.validate();
  noise.validate(period_ms);

  SplitMix64 rng(noise.rng_seed);
  SynthesisResult result;
  result.trace.nominal_period_ms = period_ms;

  const std::uint64_t total = script.total_duration_ms();
  std::size_t seg_idx = 0;
  std::uint64_t seg_start = 0;

  for (std::uint64_t nominal = 0; nominal < total; nominal += period_ms) {
    while (nominal >= seg_start + script.segments[seg_idx].duration_ms) {
      seg_start += script.segments[seg_idx].duration_ms;
      ++seg_idx;
    }
    const Segment& seg = script.segments[seg_idx];
    const std::uint64_t local = nominal - seg_start;

    SensorSample s;

    // Fixed draw order per tick keeps seeded runs reproducible.
    s.t.t_ms = nominal;
    if (noise.timing_jitter_ms > 0) {
      const std::int64_t j = static_cast<std::int64_t>(noise.timing_jitter_ms);
      const std::int64_t offset = static_cast<std::int64_t>(rng.uniform_u64(0, 2 * noise.timing_jitter_ms)) - j;
      const std::int64_t t = static_cast<std::int64_t>(nominal) + offset;
      s.t.t_ms = t < 0 ? 0 : static_cast<std::uint64_t>(t);
    }

    bool present = seg.distance != Segment::DistanceKind::Absent;
    if (present && noise.dropout_prob > 0.0 && rng.bernoulli(noise.dropout_prob)) present = false;

    if (present) {
      double value = 0.0;
      if (seg.distance == Segment::DistanceKind::Constant) {
        value = static_cast<double>(seg.cm);
      } else {
        const double frac = static_cast<double>(local) / static_cast<double>(seg.duration_ms);
        value = static_cast<double>(seg.from_cm) +
                (static_cast<double>(seg.to_cm) - static_cast<double>(seg.from_cm)) * frac;
      }
      if (noise.distance_sigma_cm > 0.0) value += noise.distance_sigma_cm * rng.gaussianish();
      long long cm = std::llround(value);
      if (cm < static_cast<long long>(kDistanceMinCm)) {
        cm = kDistanceMinCm;
        ++result.truncated_samples;
      } else if (cm > static_cast<long long>(kDistanceMaxCm)) {
        cm = kDistanceMaxCm;
        ++result.truncated_samples;
      }
      s.distance_cm = static_cast<std::uint32_t>(cm);
      s.distance_valid = true;
    }

    switch (seg.movement) {
      case Segment::MovementKind::Continuous:
        s.pir = true;
        break;
      case Segment::MovementKind::Sporadic:
        s.pir = rng.bernoulli(seg.rate_per_min * period_ms / 60000.0);
        break;
      case Segment::MovementKind::None:
        if (noise.pir_false_high_prob > 0.0) s.pir = rng.bernoulli(noise.pir_false_high_prob);
        break;
    }

    result.trace.samples.push_back(std::move(s));
  }
  return result;
}

namespace {

Segment constant(std::uint64_t dur, std::uint32_t cm, Segment::MovementKind move, std::string label,
                 double rate = 0.0) {
  Segment s;
  s.duration_ms = dur;
  s.distance = Segment::DistanceKind::Constant;
  s.cm = cm;
  s.movement = move;
  s.rate_per_min = rate;
  s.label = std::move(label);
  return s;
}

Segment ramp(std::uint64_t dur, std::uint32_t from, std::uint32_t to, Segment::MovementKind move,
             std::string label) {
  Segment s;
  s.duration_ms = dur;
  s.distance = Segment::DistanceKind::LinearRamp;
  s.from_cm = from;
  s.to_cm = to;
  s.movement = move;
  s.label = std::move(label);
  return s;
}

Segment absent(std::uint64_t dur, std::string label) {
  Segment s;
  s.duration_ms = dur;
  s.distance = Segment::DistanceKind::Absent;
  s.movement = Segment::MovementKind::None;
  s.label = std::move(label);
  return s;
}

}  // namespace

ScenarioScript builtin_scenario(BuiltinScenario id) {
  using M = Segment::MovementKind;
  ScenarioScript s;
  switch (id) {
    case BuiltinScenario::Exp1:
      s.segments = {
          constant(10000, 200, M::None, "vacant"),
          ramp(3000, 200, 65, M::Continuous, "walk in and sit down"),
          constant(90000, 65, M::None, "seated"),
          constant(3000, 160, M::Continuous, "stand and walk out"),
          constant(5000, 200, M::None, "vacant again"),
      };
      break;
    case BuiltinScenario::Exp2:
      s.segments = {
          constant(10000, 200, M::None, "vacant"),
          ramp(3000, 200, 65, M::Continuous, "walk in and sit down"),
          constant(660000, 65, M::None, "seated, motionless"),
      };
      break;
    case BuiltinScenario::Exp3:
      s.segments = {
          constant(10000, 200, M::None, "vacant"),
          ramp(3000, 200, 90, M::Continuous, "step in"),
          constant(14000, 90, M::Continuous, "brief stop, still moving"),
          ramp(3000, 90, 200, M::Continuous, "leave"),
          constant(15000, 200, M::None, "vacant again"),
      };
      break;
    case BuiltinScenario::Exp4:
      s.segments = {
          constant(10000, 200, M::None, "vacant"),
          ramp(3000, 200, 65, M::Continuous, "walk in and sit down"),
          constant(60000, 65, M::None, "seated"),
          constant(660000, 160, M::None, "slid out of the beam, motionless"),
      };
      break;
    case BuiltinScenario::Exp5:
      s.segments = {
          constant(10000, 200, M::None, "vacant"),
          ramp(2000, 200, 140, M::Continuous, "step in"),
          constant(1500, 140, M::None, "crumples in place"),
          constant(660000, 160, M::None, "collapsed, motionless"),
      };
      break;
  }
  return s;
}

std::string to_string(BuiltinScenario id) {
  switch (id) {
    case BuiltinScenario::Exp1: return "EXP1";
    case BuiltinScenario::Exp2: return "EXP2";
    case BuiltinScenario::Exp3: return "EXP3";
    case BuiltinScenario::Exp4: return "EXP4";
    case BuiltinScenario::Exp5: return "EXP5";
  }
  return "?";
}

std::optional<BuiltinScenario> builtin_scenario_from_string(const std::string& name) {
  for (auto id : {BuiltinScenario::Exp1, BuiltinScenario::Exp2, BuiltinScenario::Exp3,
                  BuiltinScenario::Exp4, BuiltinScenario::Exp5}) {
    if (to_string(id) == name) return id;
  }
  return std::nullopt;
}

ScenarioScript random_scenario(std::uint64_t seed) {
  using M = Segment::MovementKind;
  SplitMix64 rng(seed);
  ScenarioScript s;

  const auto vacant_cm = static_cast<std::uint32_t>(rng.uniform_u64(170, 260));
  s.segments.push_back(constant(rng.uniform_u64(5000, 15000), vacant_cm, M::None, "vacant"));

  auto pick_move = [&](double sporadic_lo, double sporadic_hi) {
    if (rng.bernoulli(0.5)) return std::pair<M, double>{M::Continuous, 0.0};
    return std::pair<M, double>{M::Sporadic,
                                static_cast<double>(rng.uniform_u64(
                                    static_cast<std::uint64_t>(sporadic_lo),
                                    static_cast<std::uint64_t>(sporadic_hi)))};
  };
  auto approach = [&](std::uint32_t target) {
    s.segments.push_back(ramp(rng.uniform_u64(1500, 4000), vacant_cm, target, M::Continuous, "approach"));
  };
  auto leave = [&](std::uint32_t from) {
    s.segments.push_back(ramp(rng.uniform_u64(1500, 4000), from, vacant_cm, M::Continuous, "leave"));
  };

  // Threshold-hugging values: exercises tie handling and hysteresis bands.
  static constexpr std::uint32_t kHoverValues[] = {78,  79,  80,  81,  84,  85,  86,  129,
                                                   130, 131, 134, 135, 136, 149, 150, 151};

  const std::uint64_t episodes = rng.uniform_u64(1, 4);
  for (std::uint64_t e = 0; e < episodes && s.total_duration_ms() < 850000; ++e) {
    switch (rng.uniform_u64(0, 6)) {
      case 0: {  // quick visit, no sitting
        const auto target = static_cast<std::uint32_t>(rng.uniform_u64(60, 125));
        approach(target);
        auto [move, rate] = pick_move(10, 60);
        s.segments.push_back(constant(rng.uniform_u64(3000, 30000), target, move, "linger", rate));
        leave(target);
        break;
      }
      case 1: {  // a proper sit, possibly long enough to warn or alert
        const auto target = static_cast<std::uint32_t>(rng.uniform_u64(55, 75));
        approach(target);
        if (rng.bernoulli(0.6)) {
          s.segments.push_back(constant(rng.uniform_u64(30000, 700000), target, M::None, "sit still"));
        } else {
          s.segments.push_back(constant(rng.uniform_u64(30000, 400000), target, M::Sporadic, "sit",
                                        static_cast<double>(rng.uniform_u64(1, 6))));
        }
        if (rng.bernoulli(0.7)) leave(target);
        break;
      }
      case 2: {  // sit, then slide out of the beam and stay down
        const auto target = static_cast<std::uint32_t>(rng.uniform_u64(55, 75));
        approach(target);
        s.segments.push_back(constant(rng.uniform_u64(10000, 60000), target, M::None, "sit still"));
        s.segments.push_back(constant(rng.uniform_u64(120000, 700000),
                                      static_cast<std::uint32_t>(rng.uniform_u64(152, 230)), M::None,
                                      "down, out of beam"));
        break;
      }
      case 3: {  // collapse right after entering
        s.segments.push_back(ramp(rng.uniform_u64(1000, 3000), vacant_cm,
                                  static_cast<std::uint32_t>(rng.uniform_u64(95, 149)), M::Continuous,
                                  "step in"));
        s.segments.push_back(constant(rng.uniform_u64(120000, 700000),
                                      static_cast<std::uint32_t>(rng.uniform_u64(152, 230)), M::None,
                                      "collapsed"));
        break;
      }
      case 4: {  // sensor outage
        s.segments.push_back(absent(rng.uniform_u64(800, 12000), "outage"));
        break;
      }
      case 5: {  // hover right on a rule boundary
        const auto cm = kHoverValues[rng.uniform_u64(0, std::size(kHoverValues) - 1)];
        auto [move, rate] = pick_move(5, 40);
        s.segments.push_back(constant(rng.uniform_u64(4000, 40000), cm, move, "hover", rate));
        break;
      }
      case 6: {  // wander between the bands
        const auto cm = static_cast<std::uint32_t>(rng.uniform_u64(86, 135));
        auto [move, rate] = pick_move(10, 60);
        s.segments.push_back(constant(rng.uniform_u64(3000, 20000), cm, move, "wander", rate));
        break;
      }
    }
    if (rng.bernoulli(0.5)) {
      s.segments.push_back(constant(rng.uniform_u64(3000, 30000), vacant_cm, M::None, "vacant gap"));
    }
  }
  s.segments.push_back(constant(rng.uniform_u64(5000, 15000), vacant_cm, M::None, "vacant tail"));
  return s;
}

namespace {

using nlohmann::ordered_json;

const char* distance_kind_name(Segment::DistanceKind k) {
  switch (k) {
    case Segment::DistanceKind::Constant: return "CONSTANT";
    case Segment::DistanceKind::LinearRamp: return "LINEAR_RAMP";
    case Segment::DistanceKind::Absent: return "ABSENT";
  }
  return "?";
}

const char* movement_kind_name(Segment::MovementKind k) {
  switch (k) {
    case Segment::MovementKind::None: return "NONE";
    case Segment::MovementKind::Continuous: return "CONTINUOUS";
    case Segment::MovementKind::Sporadic: return "SPORADIC";
  }
  return "?";
}

}  // namespace

std::string scenario_to_json(const ScenarioFile& f) {
  ordered_json root;
  root["period_ms"] = f.period_ms;
  root["segments"] = ordered_json::array();
  for (const auto& seg : f.script.segments) {
    ordered_json j;
    j["duration_ms"] = seg.duration_ms;
    ordered_json d;
    d["kind"] = distance_kind_name(seg.distance);
    if (seg.distance == Segment::DistanceKind::Constant) {
      d["cm"] = seg.cm;
    } else if (seg.distance == Segment::DistanceKind::LinearRamp) {
      d["from_cm"] = seg.from_cm;
      d["to_cm"] = seg.to_cm;
    }
    j["distance"] = std::move(d);
    ordered_json m;
    m["kind"] = movement_kind_name(seg.movement);
    if (seg.movement == Segment::MovementKind::Sporadic) m["rate_per_min"] = seg.rate_per_min;
    j["movement"] = std::move(m);
    j["label"] = seg.label;
    root["segments"].push_back(std::move(j));
  }
  ordered_json n;
  n["distance_sigma_cm"] = f.noise.distance_sigma_cm;
  n["dropout_prob"] = f.noise.dropout_prob;
  n["pir_false_high_prob"] = f.noise.pir_false_high_prob;
  n["timing_jitter_ms"] = f.noise.timing_jitter_ms;
  n["rng_seed"] = f.noise.rng_seed;
  root["noise"] = std::move(n);
  return root.dump(2) + "\n";
}

ScenarioFile scenario_from_json(const std::string& text) {
  nlohmann::json root;
  try {
    root = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("scenario json: ") + e.what());
  }
  if (!root.is_object()) throw std::invalid_argument("scenario json: top level must be an object");

  ScenarioFile f;
  for (auto& [key, value] : root.items()) {
    if (key == "period_ms") {
      f.period_ms = value.get<std::uint32_t>();
    } else if (key == "noise") {
      for (auto& [nk, nv] : value.items()) {
        if (nk == "distance_sigma_cm") f.noise.distance_sigma_cm = nv.get<double>();
        else if (nk == "dropout_prob") f.noise.dropout_prob = nv.get<double>();
        else if (nk == "pir_false_high_prob") f.noise.pir_false_high_prob = nv.get<double>();
        else if (nk == "timing_jitter_ms") f.noise.timing_jitter_ms = nv.get<std::uint32_t>();
        else if (nk == "rng_seed") f.noise.rng_seed = nv.get<std::uint64_t>();
        else throw std::invalid_argument("scenario json: unknown noise field '" + nk + "'");
      }
    } else if (key == "segments") {
      if (!value.is_array()) throw std::invalid_argument("scenario json: segments must be an array");
      for (std::size_t i = 0; i < value.size(); ++i) {
        const auto& j = value[i];
        auto fail = [&](const std::string& msg) {
          throw std::invalid_argument("scenario json: segment " + std::to_string(i) + ": " + msg);
        };
        Segment seg;
        if (!j.contains("duration_ms")) fail("missing duration_ms");
        seg.duration_ms = j["duration_ms"].get<std::uint64_t>();
        if (!j.contains("distance") || !j["distance"].contains("kind")) fail("missing distance.kind");
        const std::string dk = j["distance"]["kind"].get<std::string>();
        if (dk == "CONSTANT") {
          seg.distance = Segment::DistanceKind::Constant;
          if (!j["distance"].contains("cm")) fail("CONSTANT distance needs cm");
          seg.cm = j["distance"]["cm"].get<std::uint32_t>();
        } else if (dk == "LINEAR_RAMP") {
          seg.distance = Segment::DistanceKind::LinearRamp;
          if (!j["distance"].contains("from_cm") || !j["distance"].contains("to_cm")) {
            fail("LINEAR_RAMP distance needs from_cm and to_cm");
          }
          seg.from_cm = j["distance"]["from_cm"].get<std::uint32_t>();
          seg.to_cm = j["distance"]["to_cm"].get<std::uint32_t>();
        } else if (dk == "ABSENT") {
          seg.distance = Segment::DistanceKind::Absent;
        } else {
          fail("unknown distance kind '" + dk + "'");
        }
        if (!j.contains("movement") || !j["movement"].contains("kind")) fail("missing movement.kind");
        const std::string mk = j["movement"]["kind"].get<std::string>();
        if (mk == "NONE") seg.movement = Segment::MovementKind::None;
        else if (mk == "CONTINUOUS") seg.movement = Segment::MovementKind::Continuous;
        else if (mk == "SPORADIC") {
          seg.movement = Segment::MovementKind::Sporadic;
          if (!j["movement"].contains("rate_per_min")) fail("SPORADIC movement needs rate_per_min");
          seg.rate_per_min = j["movement"]["rate_per_min"].get<double>();
        } else {
          fail("unknown movement kind '" + mk + "'");
        }
        if (j.contains("label")) seg.label = j["label"].get<std::string>();
        f.script.segments.push_back(std::move(seg));
      }
    } else {
      throw std::invalid_argument("scenario json: unknown field '" + key + "'");
    }
  }
  f.script.validate();
  f.noise.validate(f.period_ms);
  return f;
}

ScenarioFile read_scenario_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return scenario_from_json(buf.str());
}

void write_scenario_file(const ScenarioFile& f, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  const std::string text = scenario_to_json(f);
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace vigil
