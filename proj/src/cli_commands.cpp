#include "vigil/cli.hpp"

#include <cstdlib>
#include <fstream>
#include <memory>
#include <ostream>
#include <sstream>
#include <vector>

#include "vigil/config_io.hpp"
#include "vigil/frame_codec.hpp"
#include "vigil/manifest.hpp"
#include "vigil/oracle.hpp"
#include "vigil/rng.hpp"
#include "vigil/sha256.hpp"
#include "vigil/simulator.hpp"
#include "vigil/sink.hpp"

namespace vigil::cli {

namespace {

std::vector<std::uint8_t> read_binary_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open: " + path);
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return bytes;
}

}  // namespace

int cmd_decode(const DecodeArgs& args, std::ostream& out, std::ostream& err) {
  try {
    if (args.period_ms == 0) throw std::invalid_argument("period must be > 0");
    const auto bytes = read_binary_file(args.raw_path);
    FrameDecoder decoder;
    const auto frames = decoder.push(bytes);
    const DecodeStats stats = decoder.stats();
    const std::size_t trailing = decoder.pending_bytes();

    Trace trace;
    trace.nominal_period_ms = args.period_ms;
    for (std::size_t i = 0; i < frames.size(); ++i) {
      SensorSample s;
      s.t.t_ms = static_cast<std::uint64_t>(i) * args.period_ms;
      s.pir = false;
      if (frames[i].checksum_ok) {
        s.distance_cm = frames[i].distance_cm;
        s.distance_valid =
            frames[i].distance_cm >= kDistanceMinCm && frames[i].distance_cm <= kDistanceMaxCm;
      }
      trace.samples.push_back(s);
    }
    write_trace_file(trace, args.out_trace);

    RunManifest m;
    m.command = "decode";
    m.period_ms = args.period_ms;
    m.inputs[args.raw_path] = sha256_file_hex(args.raw_path);
    m.outputs[args.out_trace] = sha256_file_hex(args.out_trace);
    write_manifest(m, args.out_trace);

    out << "frames_ok=" << stats.frames_ok << " frames_bad_checksum=" << stats.frames_bad_checksum
        << " bytes_skipped_resync=" << stats.bytes_skipped_resync << "\n";
    err << "note: raw captures carry no motion channel; pir column zero-filled\n";
    if (trailing > 0) err << "warning: " << trailing << " trailing byte(s) form a partial frame\n";
    return kExitOk;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitError;
  }
}

int cmd_simulate(const SimulateArgs& args, std::ostream& out, std::ostream& err) {
  try {
    if (args.scenario_path.has_value() == args.builtin.has_value()) {
      throw std::invalid_argument("pass exactly one of a scenario file or --builtin");
    }

    ScenarioFile file;
    std::optional<std::string> scenario_input_path;
    if (args.builtin) {
      auto id = builtin_scenario_from_string(*args.builtin);
      if (!id) {
        throw std::invalid_argument("unknown builtin scenario '" + *args.builtin +
                                    "' (expected EXP1..EXP5)");
      }
      file.script = builtin_scenario(*id);
      file.noise = NoiseModel::none();  // canonical runs are noise-free unless overridden
      file.period_ms = 50;
    } else {
      file = read_scenario_file(*args.scenario_path);
      scenario_input_path = *args.scenario_path;
    }

    if (args.seed) file.noise.rng_seed = *args.seed;
    if (args.sigma_cm) file.noise.distance_sigma_cm = *args.sigma_cm;
    if (args.dropout_prob) file.noise.dropout_prob = *args.dropout_prob;
    if (args.pir_false_high_prob) file.noise.pir_false_high_prob = *args.pir_false_high_prob;
    if (args.jitter_ms) file.noise.timing_jitter_ms = *args.jitter_ms;
    if (args.period_ms) file.period_ms = *args.period_ms;

    const auto result = synthesize(file.script, file.noise, file.period_ms);
    write_trace_file(result.trace, args.out_trace);
    if (args.write_scenario) write_scenario_file(file, *args.write_scenario);

    RunManifest m;
    m.command = "simulate";
    m.noise = file.noise;
    m.period_ms = file.period_ms;
    m.truncated_samples = result.truncated_samples;
    if (scenario_input_path) m.inputs[*scenario_input_path] = sha256_file_hex(*scenario_input_path);
    else m.inputs["builtin:" + *args.builtin] = sha256_hex(scenario_to_json(file));
    m.outputs[args.out_trace] = sha256_file_hex(args.out_trace);
    write_manifest(m, args.out_trace);

    out << "samples=" << result.trace.samples.size() << " duration_ms=" << file.script.total_duration_ms()
        << " seed=" << file.noise.rng_seed << "\n";
    if (result.truncated_samples > 0) {
      err << "note: " << result.truncated_samples << " noisy reading(s) pinned to the sensor window edge\n";
    }
    return kExitOk;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitError;
  }
}

int cmd_replay(const ReplayArgs& args, std::ostream& out, std::ostream& err) {
  try {
    PipelineConfig cfg;
    std::optional<std::string> config_path = args.config_path;
    if (!config_path) {
      if (const char* env = std::getenv(kConfigEnvVar); env && *env) config_path = env;
    }
    if (config_path) cfg = read_pipeline_config(*config_path);

    const Trace trace = read_trace_file(args.trace_path, args.period_ms);
    const auto report = validate_trace(trace);
    if (!report.clean()) {
      for (const auto& issue : report.errors) {
        err << "trace error (sample " << issue.index << "): " << issue.detail << "\n";
      }
      return kExitError;
    }
    for (const auto& gap : report.gaps) {
      err << "trace gap (sample " << gap.index << "): " << gap.detail << "\n";
    }

    std::optional<std::ofstream> events_file;
    if (args.events_path) {
      events_file.emplace(*args.events_path, std::ios::binary);
      if (!*events_file) throw std::runtime_error("cannot open for writing: " + *args.events_path);
    }
    std::optional<std::ofstream> annotated_file;
    if (args.annotated_path) {
      annotated_file.emplace(*args.annotated_path, std::ios::binary);
      if (!*annotated_file) throw std::runtime_error("cannot open for writing: " + *args.annotated_path);
      *annotated_file << "t_ms,pir,distance_cm,valid,motion,filtered_cm,stable,ms_since_motion,"
                         "lidar_stale,state\n";
    }
    std::optional<EventLog> event_log;
    if (args.event_log_path) event_log.emplace(*args.event_log_path, args.source_id);

    std::unique_ptr<AlertEmitter> emitter;
    std::uint64_t emit_seq = 1;
    if (args.alert_endpoint) {
      const auto colon = args.alert_endpoint->rfind(':');
      if (colon == std::string::npos) {
        throw std::invalid_argument("alert endpoint must be host:port, got '" + *args.alert_endpoint + "'");
      }
      const std::string host = args.alert_endpoint->substr(0, colon);
      const int port = std::stoi(args.alert_endpoint->substr(colon + 1));
      if (port <= 0 || port > 65535) throw std::invalid_argument("alert endpoint port out of range");
      emitter = std::make_unique<AlertEmitter>(
          std::make_unique<TcpTransport>(host, static_cast<std::uint16_t>(port)));
    }

    Conditioner conditioner(cfg.conditioning);
    Detector detector(cfg.detector);
    std::size_t event_count = 0;
    bool alert_seen = false;

    for (const auto& sample : trace.samples) {
      const ConditionedSample cs = conditioner.step(sample);
      const auto events = detector.step(cs);
      for (const auto& ev : events) {
        ++event_count;
        if (ev.to == OccupancyState::Alert) alert_seen = true;
        if (events_file) *events_file << event_to_json(ev) << "\n";
        if (event_log) event_log->append_event(ev);
        if (emitter) {
          emitter->enqueue(AlertEnvelope{ev, args.source_id, cs.t, emit_seq++});
        }
      }
      if (annotated_file) {
        *annotated_file << cs.t.t_ms << ',' << (sample.pir ? 1 : 0) << ',';
        if (sample.distance_cm) *annotated_file << *sample.distance_cm;
        *annotated_file << ',' << (sample.distance_valid ? 1 : 0) << ',' << (cs.motion ? 1 : 0) << ',';
        if (cs.distance_cm) *annotated_file << *cs.distance_cm;
        *annotated_file << ',' << (cs.stable ? 1 : 0) << ',' << cs.ms_since_motion << ','
                        << (cs.lidar_stale ? 1 : 0) << ',' << to_string(detector.state()) << "\n";
      }
    }

    if (events_file) events_file->close();
    if (annotated_file) annotated_file->close();
    if (emitter) emitter->close();

    RunManifest m;
    m.command = "replay";
    m.config = cfg;
    m.period_ms = args.period_ms;
    m.inputs[args.trace_path] = sha256_file_hex(args.trace_path);
    if (config_path) m.inputs[*config_path] = sha256_file_hex(*config_path);
    if (args.events_path) m.outputs[*args.events_path] = sha256_file_hex(*args.events_path);
    if (args.annotated_path) m.outputs[*args.annotated_path] = sha256_file_hex(*args.annotated_path);
    if (args.events_path) write_manifest(m, *args.events_path);
    else if (args.annotated_path) write_manifest(m, *args.annotated_path);

    out << "samples=" << trace.samples.size() << " events=" << event_count
        << " final_state=" << to_string(detector.state()) << "\n";
    return alert_seen ? kExitAlert : kExitOk;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitError;
  }
}

int cmd_verify(const VerifyArgs& args, std::ostream& out, std::ostream& err) {
  try {
    if (args.seed_count == 0) {
      err << "warning: seed count is 0, nothing verified\n";
      return kExitOk;
    }
    const DetectorConfig dcfg;
    const ConditioningConfig ccfg;

    for (std::uint64_t i = 0; i < args.seed_count; ++i) {
      const std::uint64_t seed = args.start_seed + i;
      const ScenarioScript script = random_scenario(seed);

      // Vary the noise with the seed so the conditioned paths get exercised.
      SplitMix64 noise_rng(seed ^ 0x5EEDF00DULL);
      NoiseModel noise;
      noise.distance_sigma_cm = 3.0 * noise_rng.uniform01();
      noise.dropout_prob = 0.03 * noise_rng.uniform01();
      noise.pir_false_high_prob = 0.01 * noise_rng.uniform01();
      noise.timing_jitter_ms = static_cast<std::uint32_t>(noise_rng.uniform_u64(0, 10));
      noise.rng_seed = seed;

      const Trace trace = synthesize(script, noise).trace;
      const auto div = oracle::compare_on_trace(trace, dcfg, ccfg);
      if (div.diverged) {
        err << "divergence at seed " << seed << ": " << div.description << "\n";
        return kExitError;
      }
      if ((i + 1) % 200 == 0) out << "verified " << (i + 1) << "/" << args.seed_count << " scenarios\n";
    }
    out << "oracle equivalence holds on " << args.seed_count << " scenario(s) (seeds " << args.start_seed
        << ".." << (args.start_seed + args.seed_count - 1) << ")\n";
    return kExitOk;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitError;
  }
}

}  // namespace vigil::cli
