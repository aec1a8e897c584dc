#include <doctest.h>

#include <stdexcept>

#include "vigil/oracle.hpp"
#include "vigil/rng.hpp"
#include "vigil/simulator.hpp"

using namespace vigil;

namespace {

Trace noisy_trace(std::uint64_t seed) {
  SplitMix64 noise_rng(seed ^ 0x5EEDF00DULL);
  NoiseModel noise;
  noise.distance_sigma_cm = 3.0 * noise_rng.uniform01();
  noise.dropout_prob = 0.03 * noise_rng.uniform01();
  noise.pir_false_high_prob = 0.01 * noise_rng.uniform01();
  noise.timing_jitter_ms = static_cast<std::uint32_t>(noise_rng.uniform_u64(0, 10));
  noise.rng_seed = seed;
  return synthesize(random_scenario(seed), noise).trace;
}

}  // namespace

TEST_CASE("reference interpreter agrees with the pipeline on the canonical scenarios") {
  for (auto id : {BuiltinScenario::Exp1, BuiltinScenario::Exp2, BuiltinScenario::Exp3,
                  BuiltinScenario::Exp4, BuiltinScenario::Exp5}) {
    const auto trace = synthesize(builtin_scenario(id), NoiseModel::none()).trace;
    const auto div = oracle::compare_on_trace(trace, DetectorConfig{}, ConditioningConfig{});
    INFO("scenario ", to_string(id), ": ", div.description);
    CHECK_FALSE(div.diverged);
  }
}

TEST_CASE("reference interpreter agrees with the pipeline on random noisy scenarios") {
  for (std::uint64_t seed = 1; seed <= 60; ++seed) {
    const auto trace = noisy_trace(seed);
    const auto div = oracle::compare_on_trace(trace, DetectorConfig{}, ConditioningConfig{});
    INFO("seed ", seed, ": ", div.description);
    REQUIRE_FALSE(div.diverged);
  }
}

TEST_CASE("a deliberately skewed config on one side is caught as a divergence") {
  // same trace, but the pipeline runs with a different hysteresis than the
  // reference: the cross-check must notice
  DetectorConfig skewed;
  skewed.hysteresis_cm = 0;

  bool caught = false;
  for (std::uint64_t seed = 1; seed <= 40 && !caught; ++seed) {
    const auto trace = noisy_trace(seed);
    const auto ref = oracle::run_trace_reference(trace, DetectorConfig{}, ConditioningConfig{});
    const auto impl = run_trace(trace, skewed, ConditioningConfig{});
    caught = !(ref == impl);
  }
  CHECK(caught);
}

TEST_CASE("reference interpreter rejects out-of-order input") {
  Trace t;
  SensorSample a;
  a.t.t_ms = 100;
  SensorSample b;
  b.t.t_ms = 100;
  t.samples = {a, b};
  CHECK_THROWS_AS(oracle::run_trace_reference(t, DetectorConfig{}, ConditioningConfig{}),
                  std::invalid_argument);
}
