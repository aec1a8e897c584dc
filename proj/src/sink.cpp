#include "vigil/sink.hpp"

#include <fcntl.h>
#include <netdb.h>
#include <sys/socket.h>
#include <sys/types.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <chrono>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <system_error>

#include <json.hpp>

namespace vigil {

std::string envelope_to_json(const AlertEnvelope& env) {
  nlohmann::ordered_json j;
  j["source_id"] = env.source_id;
  j["seq"] = env.sequence;
  j["t_ms"] = env.event.t.t_ms;
  j["from"] = to_string(env.event.from);
  j["to"] = to_string(env.event.to);
  j["reason"] = to_string(env.event.reason);
  return j.dump();
}

AlertEnvelope envelope_from_json(const std::string& line) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("envelope json: ") + e.what());
  }
  AlertEnvelope env;
  env.source_id = j.at("source_id").get<std::string>();
  env.sequence = j.at("seq").get<std::uint64_t>();
  env.event.t.t_ms = j.at("t_ms").get<std::uint64_t>();
  env.emitted_at = env.event.t;
  auto from = occupancy_state_from_string(j.at("from").get<std::string>());
  auto to = occupancy_state_from_string(j.at("to").get<std::string>());
  auto reason = transition_reason_from_string(j.at("reason").get<std::string>());
  if (!from || !to || !reason) throw std::invalid_argument("envelope json: unknown state or reason name");
  env.event.from = *from;
  env.event.to = *to;
  env.event.reason = *reason;
  return env;
}

EventLog::EventLog(const std::string& path, std::string source_id, bool durable)
    : path_(path), source_id_(std::move(source_id)), durable_(durable) {
  fd_ = ::open(path.c_str(), O_WRONLY | O_CREAT | O_APPEND, 0644);
  if (fd_ < 0) {
    throw std::system_error(errno, std::generic_category(), "open event log " + path);
  }
}

EventLog::~EventLog() {
  if (fd_ >= 0) ::close(fd_);
}

std::uint64_t EventLog::append_event(const DetectionEvent& event) {
  AlertEnvelope env{event, source_id_, event.t, next_seq_};
  const std::string line = envelope_to_json(env) + "\n";

  std::size_t written = 0;
  while (written < line.size()) {
    const ssize_t n = ::write(fd_, line.data() + written, line.size() - written);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw std::system_error(errno, std::generic_category(), "append to event log " + path_);
    }
    written += static_cast<std::size_t>(n);
  }
  if (durable_ && ::fsync(fd_) != 0) {
    throw std::system_error(errno, std::generic_category(), "fsync event log " + path_);
  }
  return next_seq_++;
}

std::vector<AlertEnvelope> read_event_log(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open: " + path);
  std::vector<AlertEnvelope> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    out.push_back(envelope_from_json(line));
  }
  return out;
}

TcpTransport::TcpTransport(std::string host, std::uint16_t port)
    : host_(std::move(host)), port_(port) {}

TcpTransport::~TcpTransport() { drop(); }

void TcpTransport::drop() {
  if (fd_ >= 0) {
    ::close(fd_);
    fd_ = -1;
  }
}

bool TcpTransport::ensure_connected() {
  if (fd_ >= 0) return true;

  addrinfo hints{};
  hints.ai_family = AF_UNSPEC;
  hints.ai_socktype = SOCK_STREAM;
  addrinfo* res = nullptr;
  const std::string port_str = std::to_string(port_);
  if (::getaddrinfo(host_.c_str(), port_str.c_str(), &hints, &res) != 0) return false;

  for (addrinfo* ai = res; ai != nullptr; ai = ai->ai_next) {
    const int fd = ::socket(ai->ai_family, ai->ai_socktype, ai->ai_protocol);
    if (fd < 0) continue;
    if (::connect(fd, ai->ai_addr, ai->ai_addrlen) == 0) {
      fd_ = fd;
      break;
    }
    ::close(fd);
  }
  ::freeaddrinfo(res);
  return fd_ >= 0;
}

bool TcpTransport::send_line(const std::string& line) {
  if (!ensure_connected()) return false;
  std::size_t written = 0;
  while (written < line.size()) {
    const ssize_t n = ::send(fd_, line.data() + written, line.size() - written, MSG_NOSIGNAL);
    if (n <= 0) {
      if (n < 0 && errno == EINTR) continue;
      drop();  // reconnect on the next attempt; the whole line is resent
      return false;
    }
    written += static_cast<std::size_t>(n);
  }
  return true;
}

AlertEmitter::AlertEmitter(std::unique_ptr<AlertTransport> transport, EmitterOptions opts)
    : transport_(std::move(transport)), opts_(opts) {
  if (opts_.buffer_capacity == 0) throw std::invalid_argument("emitter buffer_capacity must be > 0");
  thread_ = std::thread([this] { worker(); });
}

AlertEmitter::~AlertEmitter() { close(); }

bool AlertEmitter::enqueue(AlertEnvelope env) {
  std::unique_lock lock(mu_);
  if (closing_) return false;
  if (queue_.size() >= opts_.buffer_capacity) {
    // Shed the oldest non-alert first; alerts hold their ground until the
    // buffer holds nothing else.
    auto victim = std::find_if(queue_.begin(), queue_.end(),
                               [](const AlertEnvelope& e) { return !is_alert(e); });
    if (victim != queue_.end()) {
      ++stats_.dropped_non_alert;
      queue_.erase(victim);
    } else if (!is_alert(env)) {
      ++stats_.dropped_non_alert;
      return false;  // all buffered envelopes outrank the incoming one
    } else {
      ++stats_.dropped_alert;
      queue_.pop_front();
    }
  }
  queue_.push_back(std::move(env));
  lock.unlock();
  cv_.notify_one();
  return true;
}

void AlertEmitter::worker() {
  std::uint32_t backoff_ms = opts_.backoff_initial_ms;
  while (true) {
    AlertEnvelope env;
    {
      std::unique_lock lock(mu_);
      cv_.wait(lock, [this] { return closing_ || !queue_.empty(); });
      if (queue_.empty()) return;  // closing and drained
      env = queue_.front();
    }

    if (transport_->send_line(envelope_to_json(env) + "\n")) {
      std::unique_lock lock(mu_);
      // The head may have been shed under overflow while we were sending.
      if (!queue_.empty() && queue_.front() == env) queue_.pop_front();
      ++stats_.delivered;
      backoff_ms = opts_.backoff_initial_ms;
      if (queue_.empty()) drained_.notify_all();
      continue;
    }

    {
      std::unique_lock lock(mu_);
      ++stats_.send_failures;
      if (closing_) {  // give up on shutdown rather than spin
        queue_.clear();
        drained_.notify_all();
        return;
      }
      cv_.wait_for(lock, std::chrono::milliseconds(backoff_ms),
                   [this] { return closing_; });
    }
    backoff_ms = std::min(backoff_ms * 2, opts_.backoff_max_ms);
  }
}

void AlertEmitter::flush() {
  std::unique_lock lock(mu_);
  drained_.wait(lock, [this] { return queue_.empty() || closing_; });
}

void AlertEmitter::close() {
  {
    std::unique_lock lock(mu_);
    if (closing_) {
      // already closing; just make sure the thread is joined
    }
    closing_ = true;
  }
  cv_.notify_all();
  drained_.notify_all();
  if (thread_.joinable()) thread_.join();
}

EmitterStats AlertEmitter::stats() const {
  std::unique_lock lock(mu_);
  return stats_;
}

bool EnvelopeDeduper::accept(const AlertEnvelope& env) {
  const auto key = std::make_pair(env.source_id, env.sequence);
  if (std::find(seen_.begin(), seen_.end(), key) != seen_.end()) return false;
  seen_.push_back(key);
  return true;
}

}  // namespace vigil
