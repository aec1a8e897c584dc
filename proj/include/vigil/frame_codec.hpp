#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace vigil {

/// Periodic rangefinder data frame, 9 bytes on the wire:
///
///   byte 0  0x59            header
///   byte 1  0x59            header
///   byte 2  dist low        distance, cm, little-endian u16
///   byte 3  dist high
///   byte 4  strength low    signal amplitude, little-endian u16
///   byte 5  strength high
///   byte 6  temp low        raw chip temperature, little-endian u16
///   byte 7  temp high       (degC = temp_raw / 8 - 256; kept raw here)
///   byte 8  checksum        low 8 bits of the sum of bytes 0..7
inline constexpr std::size_t kFrameLength = 9;
inline constexpr std::uint8_t kFrameHeaderByte = 0x59;

struct LidarFrame {
  std::uint16_t distance_cm = 0;
  std::uint16_t strength = 0;
  std::uint16_t temp_raw = 0;
  bool checksum_ok = false;

  bool operator==(const LidarFrame&) const = default;
};

struct DecodeStats {
  std::uint64_t frames_ok = 0;
  std::uint64_t frames_bad_checksum = 0;
  std::uint64_t bytes_skipped_resync = 0;
};

/// Incremental decoder: feed bytes as they arrive, collect frames as they
/// complete. Frames already emitted never change when more bytes arrive.
///
/// Never fails: bytes that can't be framed are counted and dropped one at a
/// time until the next 0x59 0x59 header pair. A frame whose checksum does
/// not match is still emitted (checksum_ok=false) and consumes its 9 bytes;
/// whether to trust it is the consumer's call.
class FrameDecoder {
 public:
  /// Appends bytes and returns the frames completed by them, in order.
  std::vector<LidarFrame> push(std::span<const std::uint8_t> bytes);

  const DecodeStats& stats() const { return stats_; }

  /// Bytes buffered waiting for more input (partial frame or lone header byte).
  std::size_t pending_bytes() const { return buffer_.size(); }

 private:
  std::vector<std::uint8_t> buffer_;
  DecodeStats stats_;
};

/// One-shot convenience over FrameDecoder.
std::pair<std::vector<LidarFrame>, DecodeStats> decode_stream(std::span<const std::uint8_t> bytes);

/// Builds a wire frame. Fields are validated against the 16-bit wire width;
/// an oversized field throws std::invalid_argument naming it.
std::array<std::uint8_t, kFrameLength> encode_frame(std::uint32_t distance_cm, std::uint32_t strength,
                                                    std::uint32_t temp_raw);

}  // namespace vigil
