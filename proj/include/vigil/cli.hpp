#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

namespace vigil::cli {

// Exit code contract, stable for shell-level automation:
//   0  success
//   1  any error (bad input, bad usage, I/O failure, verification failure)
//   2  replay completed and the trace raised an ALERT
inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitAlert = 2;

/// Environment variable consulted for the default replay config path.
inline constexpr const char* kConfigEnvVar = "VIGIL_CONFIG";

struct DecodeArgs {
  std::string raw_path;
  std::string out_trace;
  std::uint32_t period_ms = 50;  // synthesized row cadence; captures carry no clock
};
int cmd_decode(const DecodeArgs& args, std::ostream& out, std::ostream& err);

struct SimulateArgs {
  std::optional<std::string> scenario_path;  // exactly one of these two
  std::optional<std::string> builtin;        // EXP1..EXP5
  std::string out_trace;
  std::optional<std::uint64_t> seed;
  std::optional<double> sigma_cm;
  std::optional<double> dropout_prob;
  std::optional<double> pir_false_high_prob;
  std::optional<std::uint32_t> jitter_ms;
  std::optional<std::uint32_t> period_ms;
  std::optional<std::string> write_scenario;  // dump the effective scenario JSON
};
int cmd_simulate(const SimulateArgs& args, std::ostream& out, std::ostream& err);

struct ReplayArgs {
  std::string trace_path;
  std::optional<std::string> config_path;  // falls back to $VIGIL_CONFIG, then defaults
  std::optional<std::string> events_path;
  std::optional<std::string> annotated_path;
  std::optional<std::string> event_log_path;
  std::optional<std::string> alert_endpoint;  // host:port
  std::string source_id = "vigil-0";
  std::uint32_t period_ms = 50;
};
int cmd_replay(const ReplayArgs& args, std::ostream& out, std::ostream& err);

struct VerifyArgs {
  std::uint64_t seed_count = 1000;
  std::uint64_t start_seed = 1;
};
int cmd_verify(const VerifyArgs& args, std::ostream& out, std::ostream& err);

}  // namespace vigil::cli
