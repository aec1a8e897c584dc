#include <iostream>

#include <CLI11.hpp>

#include "vigil/cli.hpp"
#include "vigil/manifest.hpp"

int main(int argc, char** argv) {
  CLI::App app{"vigil - PIR + rangefinder occupancy and inactivity detection"};
  app.set_version_flag("--version", std::string("vigil ") + vigil::kToolVersion);
  app.require_subcommand(1);

  vigil::cli::DecodeArgs decode_args;
  auto* decode = app.add_subcommand("decode", "Decode a raw rangefinder capture into a trace CSV");
  decode->add_option("raw", decode_args.raw_path, "Raw capture file (bytes off the wire)")->required();
  decode->add_option("--out", decode_args.out_trace, "Output trace CSV path")->required();
  decode->add_option("--period", decode_args.period_ms, "Row cadence in ms (default 50)");

  vigil::cli::SimulateArgs sim_args;
  std::string sim_scenario;
  std::string sim_builtin;
  auto* simulate = app.add_subcommand("simulate", "Render a scenario script into a trace CSV");
  simulate->add_option("scenario", sim_scenario, "Scenario JSON file");
  simulate->add_option("--builtin", sim_builtin, "Canonical scenario id (EXP1..EXP5)");
  simulate->add_option("--out", sim_args.out_trace, "Output trace CSV path")->required();
  std::uint64_t sim_seed = 0;
  auto* seed_opt = simulate->add_option("--seed", sim_seed, "RNG seed override");
  double sim_sigma = 0, sim_dropout = 0, sim_pir_false = 0;
  std::uint32_t sim_jitter = 0, sim_period = 0;
  auto* sigma_opt = simulate->add_option("--sigma", sim_sigma, "Distance noise sigma, cm");
  auto* dropout_opt = simulate->add_option("--dropout", sim_dropout, "Per-sample dropout probability");
  auto* pir_false_opt =
      simulate->add_option("--pir-false-high", sim_pir_false, "Per-sample PIR false-high probability");
  auto* jitter_opt = simulate->add_option("--jitter", sim_jitter, "Timing jitter, +/- ms");
  auto* period_opt = simulate->add_option("--period", sim_period, "Sample period in ms");
  std::string sim_write_scenario;
  auto* write_scn_opt = simulate->add_option("--write-scenario", sim_write_scenario,
                                             "Also dump the effective scenario JSON here");

  vigil::cli::ReplayArgs replay_args;
  std::string replay_config, replay_events, replay_annotated, replay_log, replay_endpoint;
  auto* replay = app.add_subcommand("replay", "Run a trace CSV through the detector");
  replay->add_option("trace", replay_args.trace_path, "Trace CSV file")->required();
  auto* cfg_opt = replay->add_option("--config", replay_config,
                                     "Pipeline config JSON (default: $VIGIL_CONFIG, else built-ins)");
  auto* ev_opt = replay->add_option("--events", replay_events, "Write detection events (JSON Lines)");
  auto* ann_opt =
      replay->add_option("--annotated", replay_annotated, "Write per-tick annotated CSV for plotting");
  auto* log_opt = replay->add_option("--event-log", replay_log, "Append events to a durable event log");
  auto* ep_opt =
      replay->add_option("--alert-endpoint", replay_endpoint, "Stream events to host:port as JSON lines");
  replay->add_option("--source-id", replay_args.source_id, "Source id stamped on emitted events");
  replay->add_option("--period", replay_args.period_ms, "Nominal sample period for gap reporting");

  vigil::cli::VerifyArgs verify_args;
  auto* verify = app.add_subcommand("verify", "Cross-check the detector against the reference interpreter");
  verify->add_option("--seeds", verify_args.seed_count, "Number of random scenarios (default 1000)");
  verify->add_option("--start-seed", verify_args.start_seed, "First seed (default 1)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);  // prints help/usage text
    return code == 0 ? 0 : vigil::cli::kExitError;
  }

  if (decode->parsed()) return vigil::cli::cmd_decode(decode_args, std::cout, std::cerr);

  if (simulate->parsed()) {
    if (!sim_scenario.empty()) sim_args.scenario_path = sim_scenario;
    if (!sim_builtin.empty()) sim_args.builtin = sim_builtin;
    if (*seed_opt) sim_args.seed = sim_seed;
    if (*sigma_opt) sim_args.sigma_cm = sim_sigma;
    if (*dropout_opt) sim_args.dropout_prob = sim_dropout;
    if (*pir_false_opt) sim_args.pir_false_high_prob = sim_pir_false;
    if (*jitter_opt) sim_args.jitter_ms = sim_jitter;
    if (*period_opt) sim_args.period_ms = sim_period;
    if (*write_scn_opt) sim_args.write_scenario = sim_write_scenario;
    return vigil::cli::cmd_simulate(sim_args, std::cout, std::cerr);
  }

  if (replay->parsed()) {
    if (*cfg_opt) replay_args.config_path = replay_config;
    if (*ev_opt) replay_args.events_path = replay_events;
    if (*ann_opt) replay_args.annotated_path = replay_annotated;
    if (*log_opt) replay_args.event_log_path = replay_log;
    if (*ep_opt) replay_args.alert_endpoint = replay_endpoint;
    return vigil::cli::cmd_replay(replay_args, std::cout, std::cerr);
  }

  if (verify->parsed()) return vigil::cli::cmd_verify(verify_args, std::cout, std::cerr);

  return vigil::cli::kExitError;
}
