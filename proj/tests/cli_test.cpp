#include <doctest.h>

#include <unistd.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "vigil/cli.hpp"
#include "vigil/frame_codec.hpp"
#include "vigil/sink.hpp"
#include "vigil/trace.hpp"

using namespace vigil;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path dir;
  TempDir() {
    dir = fs::temp_directory_path() / ("vigil_cli_" + std::to_string(::getpid()) + "_" +
                                       std::to_string(counter()++));
    fs::create_directories(dir);
  }
  ~TempDir() { fs::remove_all(dir); }
  std::string operator/(const char* name) const { return (dir / name).string(); }
  static int& counter() {
    static int c = 0;
    return c;
  }
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

int run_decode(const cli::DecodeArgs& args) {
  std::ostringstream out, err;
  return cli::cmd_decode(args, out, err);
}

}  // namespace

TEST_CASE("decode: valid frames become csv rows; pir is zero-filled") {
  TempDir tmp;
  const auto raw = tmp / "capture.bin";
  {
    std::ofstream f(raw, std::ios::binary);
    const auto a = encode_frame(65, 1500, 288);
    const auto b = encode_frame(160, 900, 288);
    f.write(reinterpret_cast<const char*>(a.data()), a.size());
    f.write(reinterpret_cast<const char*>(b.data()), b.size());
  }
  const auto out_csv = tmp / "trace.csv";
  std::ostringstream out, err;
  CHECK(cli::cmd_decode({raw, out_csv, 50}, out, err) == cli::kExitOk);
  CHECK(slurp(out_csv) ==
        "t_ms,pir,distance_cm,valid\n"
        "0,0,65,1\n"
        "50,0,160,1\n");
  CHECK(out.str().find("frames_ok=2") != std::string::npos);
  CHECK(fs::exists(out_csv + ".manifest.json"));
}

TEST_CASE("decode: empty capture yields a header-only csv and exit 0") {
  TempDir tmp;
  const auto raw = tmp / "empty.bin";
  std::ofstream(raw, std::ios::binary).close();
  const auto out_csv = tmp / "trace.csv";
  CHECK(run_decode({raw, out_csv, 50}) == cli::kExitOk);
  CHECK(slurp(out_csv) == "t_ms,pir,distance_cm,valid\n");
}

TEST_CASE("decode: truncated final frame is dropped with a warning") {
  TempDir tmp;
  const auto raw = tmp / "truncated.bin";
  {
    std::ofstream f(raw, std::ios::binary);
    const auto a = encode_frame(65, 1500, 288);
    f.write(reinterpret_cast<const char*>(a.data()), a.size());
    f.write(reinterpret_cast<const char*>(a.data()), 5);  // partial second frame
  }
  const auto out_csv = tmp / "trace.csv";
  std::ostringstream out, err;
  CHECK(cli::cmd_decode({raw, out_csv, 50}, out, err) == cli::kExitOk);
  CHECK(slurp(out_csv) ==
        "t_ms,pir,distance_cm,valid\n"
        "0,0,65,1\n");
  CHECK(err.str().find("partial frame") != std::string::npos);
}

TEST_CASE("decode: missing input file fails with a diagnostic") {
  TempDir tmp;
  std::ostringstream out, err;
  CHECK(cli::cmd_decode({tmp / "nope.bin", tmp / "out.csv", 50}, out, err) == cli::kExitError);
  CHECK(err.str().find("error:") != std::string::npos);
}

TEST_CASE("decode: out-of-range distances are kept but marked untrusted") {
  TempDir tmp;
  const auto raw = tmp / "far.bin";
  {
    std::ofstream f(raw, std::ios::binary);
    const auto a = encode_frame(1200, 100, 288);  // beyond the sensor window
    f.write(reinterpret_cast<const char*>(a.data()), a.size());
  }
  const auto out_csv = tmp / "trace.csv";
  CHECK(run_decode({raw, out_csv, 50}) == cli::kExitOk);
  CHECK(slurp(out_csv) ==
        "t_ms,pir,distance_cm,valid\n"
        "0,0,1200,0\n");
}

TEST_CASE("simulate: builtin scenario, fixed seed, byte-identical reruns") {
  TempDir tmp;
  cli::SimulateArgs args;
  args.builtin = "EXP1";
  args.out_trace = tmp / "a.csv";
  std::ostringstream out, err;
  REQUIRE(cli::cmd_simulate(args, out, err) == cli::kExitOk);
  const auto first = slurp(tmp / "a.csv");

  args.out_trace = tmp / "b.csv";
  REQUIRE(cli::cmd_simulate(args, out, err) == cli::kExitOk);
  CHECK(first == slurp(tmp / "b.csv"));
  CHECK(fs::exists((tmp / "a.csv") + std::string(".manifest.json")));

  // manifests are reproducible too (no wall-clock inside)
  const auto ma = slurp((tmp / "a.csv") + std::string(".manifest.json"));
  const auto mb = slurp((tmp / "b.csv") + std::string(".manifest.json"));
  auto strip_path = [](std::string s, const std::string& from, const std::string& to) {
    if (auto pos = s.find(from); pos != std::string::npos) s.replace(pos, from.size(), to);
    return s;
  };
  CHECK(strip_path(ma, "a.csv", "x.csv") == strip_path(mb, "b.csv", "x.csv"));
}

TEST_CASE("simulate: unknown builtin id is a usage error") {
  TempDir tmp;
  cli::SimulateArgs args;
  args.builtin = "EXP9";
  args.out_trace = tmp / "out.csv";
  std::ostringstream out, err;
  CHECK(cli::cmd_simulate(args, out, err) == cli::kExitError);
  CHECK(err.str().find("EXP1..EXP5") != std::string::npos);
}

TEST_CASE("simulate: scenario file round-trip through --write-scenario") {
  TempDir tmp;
  cli::SimulateArgs args;
  args.builtin = "EXP3";
  args.out_trace = tmp / "a.csv";
  args.seed = 99;
  args.write_scenario = tmp / "scenario.json";
  std::ostringstream out, err;
  REQUIRE(cli::cmd_simulate(args, out, err) == cli::kExitOk);

  cli::SimulateArgs from_file;
  from_file.scenario_path = tmp / "scenario.json";
  from_file.out_trace = tmp / "b.csv";
  REQUIRE(cli::cmd_simulate(from_file, out, err) == cli::kExitOk);
  CHECK(slurp(tmp / "a.csv") == slurp(tmp / "b.csv"));
}

TEST_CASE("replay: long sit raises the alert exit code and writes both outputs") {
  TempDir tmp;
  cli::SimulateArgs sim;
  sim.builtin = "EXP2";
  sim.out_trace = tmp / "exp2.csv";
  std::ostringstream out, err;
  REQUIRE(cli::cmd_simulate(sim, out, err) == cli::kExitOk);

  cli::ReplayArgs rep;
  rep.trace_path = tmp / "exp2.csv";
  rep.events_path = tmp / "events.jsonl";
  rep.annotated_path = tmp / "annotated.csv";
  rep.event_log_path = tmp / "log.jsonl";
  rep.source_id = "bath-1";
  std::ostringstream rout, rerr;
  CHECK(cli::cmd_replay(rep, rout, rerr) == cli::kExitAlert);

  // events file: one json object per line, WARNING then ALERT present
  const auto events_text = slurp(tmp / "events.jsonl");
  CHECK(events_text.find("\"to\":\"WARNING\"") != std::string::npos);
  CHECK(events_text.find("\"to\":\"ALERT\"") != std::string::npos);

  // durable log ends on the alert and carries the source id
  const auto log = read_event_log(tmp / "log.jsonl");
  REQUIRE_FALSE(log.empty());
  CHECK(log.back().event.to == OccupancyState::Alert);
  CHECK(log.back().source_id == "bath-1");

  // annotated csv has the expected header and one row per sample
  std::istringstream annotated(slurp(tmp / "annotated.csv"));
  std::string header;
  std::getline(annotated, header);
  CHECK(header ==
        "t_ms,pir,distance_cm,valid,motion,filtered_cm,stable,ms_since_motion,lidar_stale,state");
  std::size_t rows = 0;
  std::string line;
  while (std::getline(annotated, line)) ++rows;
  CHECK(rows == read_trace_file(tmp / "exp2.csv").samples.size());
}

TEST_CASE("replay: quick visit exits clean") {
  TempDir tmp;
  cli::SimulateArgs sim;
  sim.builtin = "EXP3";
  sim.out_trace = tmp / "exp3.csv";
  std::ostringstream out, err;
  REQUIRE(cli::cmd_simulate(sim, out, err) == cli::kExitOk);

  cli::ReplayArgs rep;
  rep.trace_path = tmp / "exp3.csv";
  rep.events_path = tmp / "events.jsonl";
  std::ostringstream rout, rerr;
  CHECK(cli::cmd_replay(rep, rout, rerr) == cli::kExitOk);
  CHECK(slurp(tmp / "events.jsonl").find("ALERT") == std::string::npos);
  CHECK(rout.str().find("final_state=IDLE") != std::string::npos);
}

TEST_CASE("replay: empty trace produces empty outputs and exit 0") {
  TempDir tmp;
  const auto trace_path = tmp / "empty.csv";
  {
    std::ofstream f(trace_path, std::ios::binary);
    f << "t_ms,pir,distance_cm,valid\n";
  }
  cli::ReplayArgs rep;
  rep.trace_path = trace_path;
  rep.events_path = tmp / "events.jsonl";
  rep.annotated_path = tmp / "annotated.csv";
  std::ostringstream rout, rerr;
  CHECK(cli::cmd_replay(rep, rout, rerr) == cli::kExitOk);
  CHECK(slurp(tmp / "events.jsonl").empty());
  CHECK(slurp(tmp / "annotated.csv") ==
        "t_ms,pir,distance_cm,valid,motion,filtered_cm,stable,ms_since_motion,lidar_stale,state\n");
}

TEST_CASE("replay: invalid trace is refused") {
  TempDir tmp;
  const auto trace_path = tmp / "bad.csv";
  {
    std::ofstream f(trace_path, std::ios::binary);
    f << "t_ms,pir,distance_cm,valid\n100,0,200,1\n50,0,200,1\n";
  }
  cli::ReplayArgs rep;
  rep.trace_path = trace_path;
  std::ostringstream rout, rerr;
  CHECK(cli::cmd_replay(rep, rout, rerr) == cli::kExitError);
  CHECK(rerr.str().find("trace error") != std::string::npos);
}

TEST_CASE("replay: config file overrides thresholds") {
  TempDir tmp;
  const auto cfg_path = tmp / "cfg.json";
  {
    std::ofstream f(cfg_path, std::ios::binary);
    // warn after 2s, alert after 4s: the short EXP1 sit now alerts
    f << R"({"detector":{"warning_ms":2000,"fall_suspect_ms":1000,"alert_ms":4000}})";
  }
  cli::SimulateArgs sim;
  sim.builtin = "EXP1";
  sim.out_trace = tmp / "exp1.csv";
  std::ostringstream out, err;
  REQUIRE(cli::cmd_simulate(sim, out, err) == cli::kExitOk);

  cli::ReplayArgs rep;
  rep.trace_path = tmp / "exp1.csv";
  rep.config_path = cfg_path;
  std::ostringstream rout, rerr;
  CHECK(cli::cmd_replay(rep, rout, rerr) == cli::kExitAlert);
}

TEST_CASE("replay: config falls back to the environment variable") {
  TempDir tmp;
  const auto cfg_path = tmp / "fast.json";
  {
    std::ofstream f(cfg_path, std::ios::binary);
    f << R"({"detector":{"warning_ms":2000,"fall_suspect_ms":1000,"alert_ms":4000}})";
  }
  cli::SimulateArgs sim;
  sim.builtin = "EXP1";
  sim.out_trace = tmp / "exp1.csv";
  std::ostringstream out, err;
  REQUIRE(cli::cmd_simulate(sim, out, err) == cli::kExitOk);

  cli::ReplayArgs rep;
  rep.trace_path = tmp / "exp1.csv";
  std::ostringstream rout, rerr;
  ::setenv(cli::kConfigEnvVar, cfg_path.c_str(), 1);
  const int code = cli::cmd_replay(rep, rout, rerr);
  ::unsetenv(cli::kConfigEnvVar);
  CHECK(code == cli::kExitAlert);  // the fast timers only took effect via the env config
}

TEST_CASE("replay: bad config is refused with the field named") {
  TempDir tmp;
  const auto cfg_path = tmp / "cfg.json";
  {
    std::ofstream f(cfg_path, std::ios::binary);
    f << R"({"detector":{"warning_msec":2000}})";
  }
  const auto trace_path = tmp / "empty.csv";
  {
    std::ofstream f(trace_path, std::ios::binary);
    f << "t_ms,pir,distance_cm,valid\n";
  }
  cli::ReplayArgs rep;
  rep.trace_path = trace_path;
  rep.config_path = cfg_path;
  std::ostringstream rout, rerr;
  CHECK(cli::cmd_replay(rep, rout, rerr) == cli::kExitError);
  CHECK(rerr.str().find("warning_msec") != std::string::npos);
}

TEST_CASE("verify: a small seed batch passes; zero seeds warns") {
  std::ostringstream out, err;
  cli::VerifyArgs args;
  args.seed_count = 5;
  args.start_seed = 500;
  CHECK(cli::cmd_verify(args, out, err) == cli::kExitOk);
  CHECK(out.str().find("oracle equivalence holds") != std::string::npos);

  cli::VerifyArgs zero;
  zero.seed_count = 0;
  std::ostringstream out2, err2;
  CHECK(cli::cmd_verify(zero, out2, err2) == cli::kExitOk);
  CHECK(err2.str().find("nothing verified") != std::string::npos);
}
