#include "vigil/frame_codec.hpp"

#include <stdexcept>
#include <string>

namespace vigil {

namespace {

std::uint8_t checksum8(const std::uint8_t* frame) {
  unsigned sum = 0;
  for (std::size_t i = 0; i + 1 < kFrameLength; ++i) sum += frame[i];
  return static_cast<std::uint8_t>(sum & 0xFF);
}

LidarFrame parse_frame(const std::uint8_t* p) {
  LidarFrame f;
  f.distance_cm = static_cast<std::uint16_t>(p[2] | (p[3] << 8));
  f.strength = static_cast<std::uint16_t>(p[4] | (p[5] << 8));
  f.temp_raw = static_cast<std::uint16_t>(p[6] | (p[7] << 8));
  f.checksum_ok = checksum8(p) == p[8];
  return f;
}

}  // namespace

std::vector<LidarFrame> FrameDecoder::push(std::span<const std::uint8_t> bytes) {
  buffer_.insert(buffer_.end(), bytes.begin(), bytes.end());

  std::vector<LidarFrame> frames;
  std::size_t pos = 0;
  while (true) {
    // Scan to the next header pair, dropping one byte per miss.
    if (pos >= buffer_.size()) break;
    if (buffer_[pos] != kFrameHeaderByte) {
      ++pos;
      ++stats_.bytes_skipped_resync;
      continue;
    }
    if (pos + 1 >= buffer_.size()) break;  // lone 0x59, may pair up later
    if (buffer_[pos + 1] != kFrameHeaderByte) {
      ++pos;
      ++stats_.bytes_skipped_resync;
      continue;
    }
    if (pos + kFrameLength > buffer_.size()) break;  // partial frame

    LidarFrame f = parse_frame(buffer_.data() + pos);
    if (f.checksum_ok) {
      ++stats_.frames_ok;
    } else {
      ++stats_.frames_bad_checksum;
    }
    frames.push_back(f);
    pos += kFrameLength;
  }
  buffer_.erase(buffer_.begin(), buffer_.begin() + static_cast<std::ptrdiff_t>(pos));
  return frames;
}

std::pair<std::vector<LidarFrame>, DecodeStats> decode_stream(std::span<const std::uint8_t> bytes) {
  FrameDecoder decoder;
  auto frames = decoder.push(bytes);
  return {std::move(frames), decoder.stats()};
}

std::array<std::uint8_t, kFrameLength> encode_frame(std::uint32_t distance_cm, std::uint32_t strength,
                                                    std::uint32_t temp_raw) {
  auto check16 = [](std::uint32_t v, const char* name) {
    if (v > 0xFFFF) {
      throw std::invalid_argument(std::string(name) + " (" + std::to_string(v) +
                                  ") does not fit the 16-bit wire field");
    }
  };
  check16(distance_cm, "distance_cm");
  check16(strength, "strength");
  check16(temp_raw, "temp_raw");

  std::array<std::uint8_t, kFrameLength> out{};
  out[0] = kFrameHeaderByte;
  out[1] = kFrameHeaderByte;
  out[2] = static_cast<std::uint8_t>(distance_cm & 0xFF);
  out[3] = static_cast<std::uint8_t>(distance_cm >> 8);
  out[4] = static_cast<std::uint8_t>(strength & 0xFF);
  out[5] = static_cast<std::uint8_t>(strength >> 8);
  out[6] = static_cast<std::uint8_t>(temp_raw & 0xFF);
  out[7] = static_cast<std::uint8_t>(temp_raw >> 8);
  out[8] = checksum8(out.data());
  return out;
}

}  // namespace vigil
