#include "vigil/trace.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace vigil {

ValidationReport validate_trace(const Trace& trace) {
  ValidationReport report;
  const auto& s = trace.samples;

  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i].distance_valid) {
      if (!s[i].distance_cm.has_value()) {
        report.errors.push_back({TraceIssue::Kind::Range, i,
                                 "distance_valid set but no distance present"});
      } else if (*s[i].distance_cm < kDistanceMinCm || *s[i].distance_cm > kDistanceMaxCm) {
        report.errors.push_back({TraceIssue::Kind::Range, i,
                                 "valid distance " + std::to_string(*s[i].distance_cm) +
                                     "cm outside sensor window [" + std::to_string(kDistanceMinCm) +
                                     "," + std::to_string(kDistanceMaxCm) + "]"});
      }
    }
    if (i == 0) continue;

    if (s[i].t <= s[i - 1].t) {
      report.errors.push_back({TraceIssue::Kind::Ordering, i,
                               "timestamp " + std::to_string(s[i].t.t_ms) +
                                   "ms not after previous " + std::to_string(s[i - 1].t.t_ms) + "ms"});
      continue;  // delta is meaningless against a bad stamp
    }
    const std::uint64_t delta = ms_since(s[i - 1].t, s[i].t);
    const std::uint64_t gap_limit = trace.nominal_period_ms + trace.nominal_period_ms / 5;
    if (delta > gap_limit) {
      report.gaps.push_back({TraceIssue::Kind::Gap, i,
                             "delta " + std::to_string(delta) + "ms exceeds " +
                                 std::to_string(gap_limit) + "ms"});
    }
  }
  return report;
}

std::string trace_to_csv(const Trace& trace) {
  std::string out = "t_ms,pir,distance_cm,valid\n";
  for (const auto& s : trace.samples) {
    out += std::to_string(s.t.t_ms);
    out += s.pir ? ",1," : ",0,";
    if (s.distance_cm) out += std::to_string(*s.distance_cm);
    out += s.distance_valid ? ",1\n" : ",0\n";
  }
  return out;
}

namespace {

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    std::size_t comma = line.find(',', start);
    if (comma == std::string::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

std::uint64_t parse_u64(const std::string& field, std::size_t line_no, const char* what) {
  std::uint64_t value = 0;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc{} || ptr != field.data() + field.size()) {
    throw std::invalid_argument("trace csv line " + std::to_string(line_no) + ": bad " + what +
                                " field '" + field + "'");
  }
  return value;
}

bool parse_flag(const std::string& field, std::size_t line_no, const char* what) {
  if (field == "0") return false;
  if (field == "1") return true;
  throw std::invalid_argument("trace csv line " + std::to_string(line_no) + ": " + what +
                              " must be 0 or 1, got '" + field + "'");
}

}  // namespace

Trace trace_from_csv(const std::string& text, std::uint32_t nominal_period_ms) {
  Trace trace;
  trace.nominal_period_ms = nominal_period_ms;

  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line_no == 1) {
      if (line != "t_ms,pir,distance_cm,valid") {
        throw std::invalid_argument("trace csv: unexpected header '" + line + "'");
      }
      continue;
    }
    if (line.empty()) continue;

    auto fields = split_fields(line);
    if (fields.size() != 4) {
      throw std::invalid_argument("trace csv line " + std::to_string(line_no) + ": expected 4 fields, got " +
                                  std::to_string(fields.size()));
    }
    SensorSample s;
    s.t.t_ms = parse_u64(fields[0], line_no, "t_ms");
    s.pir = parse_flag(fields[1], line_no, "pir");
    if (!fields[2].empty()) {
      s.distance_cm = static_cast<std::uint32_t>(parse_u64(fields[2], line_no, "distance_cm"));
    }
    s.distance_valid = parse_flag(fields[3], line_no, "valid");
    if (s.distance_valid && !s.distance_cm) {
      throw std::invalid_argument("trace csv line " + std::to_string(line_no) +
                                  ": valid=1 requires a distance value");
    }
    trace.samples.push_back(std::move(s));
  }
  if (line_no == 0) throw std::invalid_argument("trace csv: empty file (missing header)");
  return trace;
}

void write_trace_file(const Trace& trace, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  const std::string csv = trace_to_csv(trace);
  out.write(csv.data(), static_cast<std::streamsize>(csv.size()));
  if (!out) throw std::runtime_error("write failed: " + path);
}

Trace read_trace_file(const std::string& path, std::uint32_t nominal_period_ms) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return trace_from_csv(buf.str(), nominal_period_ms);
}

}  // namespace vigil
