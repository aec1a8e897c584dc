#pragma once

#include <condition_variable>
#include <cstdint>
#include <deque>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "vigil/detector.hpp"

namespace vigil {

/// A detection event stamped for transport: which sensor it came from and a
/// per-source sequence number assigned gap-free at enqueue time, so a
/// receiver can deduplicate at-least-once delivery.
struct AlertEnvelope {
  DetectionEvent event;
  std::string source_id;
  MonotonicTime emitted_at;
  std::uint64_t sequence = 0;

  bool operator==(const AlertEnvelope&) const = default;
};

/// Wire/log form, one object per line:
/// {"source_id":"<str>","seq":<int>,"t_ms":<int>,"from":"<state>","to":"<state>","reason":"<str>"}
std::string envelope_to_json(const AlertEnvelope& env);
AlertEnvelope envelope_from_json(const std::string& line);

/// Append-only JSON Lines event log. Each append is a single unbuffered
/// write of one full line (fsync'd by default before the call returns), so
/// a crash between appends leaves a readable prefix, never a torn line.
class EventLog {
 public:
  explicit EventLog(const std::string& path, std::string source_id, bool durable = true);
  ~EventLog();

  EventLog(const EventLog&) = delete;
  EventLog& operator=(const EventLog&) = delete;

  /// Durably appends one event; returns its sequence number.
  /// Throws std::system_error on I/O failure (retryable; no partial line is
  /// ever visible to readers).
  std::uint64_t append_event(const DetectionEvent& event);

  const std::string& source_id() const { return source_id_; }

 private:
  int fd_ = -1;
  std::string path_;
  std::string source_id_;
  bool durable_;
  std::uint64_t next_seq_ = 1;
};

std::vector<AlertEnvelope> read_event_log(const std::string& path);

/// Transport for one newline-terminated JSON object per envelope.
/// send_line returns false on transient failure; the emitter retries.
class AlertTransport {
 public:
  virtual ~AlertTransport() = default;
  virtual bool send_line(const std::string& line) = 0;
};

/// TCP client transport. Connects lazily, reconnects after any failure.
class TcpTransport : public AlertTransport {
 public:
  TcpTransport(std::string host, std::uint16_t port);
  ~TcpTransport() override;
  bool send_line(const std::string& line) override;

 private:
  bool ensure_connected();
  void drop();

  std::string host_;
  std::uint16_t port_;
  int fd_ = -1;
};

struct EmitterOptions {
  std::size_t buffer_capacity = 256;
  std::uint32_t backoff_initial_ms = 100;
  std::uint32_t backoff_max_ms = 5000;
};

struct EmitterStats {
  std::uint64_t delivered = 0;
  std::uint64_t send_failures = 0;
  std::uint64_t dropped_non_alert = 0;
  std::uint64_t dropped_alert = 0;
};

/// At-least-once alert delivery with a bounded handoff queue. enqueue()
/// never touches the network; a worker thread drains the queue in order,
/// retrying with exponential backoff. When the buffer overflows, the oldest
/// non-alert envelope goes first; alert envelopes are only dropped once the
/// buffer holds nothing else.
class AlertEmitter {
 public:
  AlertEmitter(std::unique_ptr<AlertTransport> transport, EmitterOptions opts = {});
  ~AlertEmitter();

  AlertEmitter(const AlertEmitter&) = delete;
  AlertEmitter& operator=(const AlertEmitter&) = delete;

  /// Ordered, non-blocking handoff. Returns false if the envelope was
  /// dropped to honor the buffer bound.
  bool enqueue(AlertEnvelope env);

  /// Blocks until everything enqueued so far has been delivered (or the
  /// emitter is closed).
  void flush();
  void close();

  EmitterStats stats() const;

 private:
  void worker();
  static bool is_alert(const AlertEnvelope& env) { return env.event.to == OccupancyState::Alert; }

  std::unique_ptr<AlertTransport> transport_;
  EmitterOptions opts_;

  mutable std::mutex mu_;
  std::condition_variable cv_;       // wakes the worker
  std::condition_variable drained_;  // wakes flush()
  std::deque<AlertEnvelope> queue_;
  EmitterStats stats_;
  bool closing_ = false;
  std::thread thread_;
};

/// Receiver-side dedup by (source_id, sequence): replays of the same
/// envelope collapse to the first copy, reconstructing the original order.
class EnvelopeDeduper {
 public:
  /// Returns true if this envelope is new (not seen before).
  bool accept(const AlertEnvelope& env);

 private:
  std::vector<std::pair<std::string, std::uint64_t>> seen_;
};

}  // namespace vigil
