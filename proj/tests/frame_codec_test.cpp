#include <doctest.h>

#include <stdexcept>

#include <algorithm>
#include <vector>

#include "vigil/frame_codec.hpp"
#include "vigil/rng.hpp"

using namespace vigil;

namespace {

// Independent checksum: literal sum of the first eight bytes, low 8 bits.
std::uint8_t naive_checksum(const std::vector<std::uint8_t>& first8) {
  unsigned sum = 0;
  for (std::uint8_t b : first8) sum += b;
  return static_cast<std::uint8_t>(sum % 256);
}

std::vector<std::uint8_t> naive_frame(std::uint16_t dist, std::uint16_t strength, std::uint16_t temp) {
  std::vector<std::uint8_t> f = {0x59,
                                 0x59,
                                 static_cast<std::uint8_t>(dist & 0xFF),
                                 static_cast<std::uint8_t>(dist >> 8),
                                 static_cast<std::uint8_t>(strength & 0xFF),
                                 static_cast<std::uint8_t>(strength >> 8),
                                 static_cast<std::uint8_t>(temp & 0xFF),
                                 static_cast<std::uint8_t>(temp >> 8)};
  f.push_back(naive_checksum(f));
  return f;
}

}  // namespace

TEST_CASE("decodes a seated-range frame") {
  // distance 65cm, strength 1500, temp_raw 288; checksum from the naive sum:
  // 0x59+0x59+0x41+0x00+0xDC+0x05+0x20+0x01 = 0x1F5 -> low byte 0xF5.
  const auto bytes = naive_frame(65, 1500, 288);
  REQUIRE(bytes == std::vector<std::uint8_t>{0x59, 0x59, 0x41, 0x00, 0xDC, 0x05, 0x20, 0x01, 0xF5});

  auto [frames, stats] = decode_stream(bytes);
  REQUIRE(frames.size() == 1);
  CHECK(frames[0].distance_cm == 65);
  CHECK(frames[0].strength == 1500);
  CHECK(frames[0].temp_raw == 288);
  CHECK(frames[0].checksum_ok);
  CHECK(stats.frames_ok == 1);
  CHECK(stats.frames_bad_checksum == 0);
  CHECK(stats.bytes_skipped_resync == 0);
}

TEST_CASE("empty input yields nothing") {
  auto [frames, stats] = decode_stream({});
  CHECK(frames.empty());
  CHECK(stats.frames_ok == 0);
  CHECK(stats.frames_bad_checksum == 0);
  CHECK(stats.bytes_skipped_resync == 0);
}

TEST_CASE("junk prefix is skipped byte-by-byte") {
  std::vector<std::uint8_t> bytes = {0x01, 0x02, 0x03};
  const auto frame = naive_frame(65, 1500, 288);
  bytes.insert(bytes.end(), frame.begin(), frame.end());

  auto [frames, stats] = decode_stream(bytes);
  REQUIRE(frames.size() == 1);
  CHECK(frames[0].distance_cm == 65);
  CHECK(frames[0].checksum_ok);
  CHECK(stats.bytes_skipped_resync == 3);
}

TEST_CASE("encode matches the naive byte layout") {
  CHECK(encode_frame(65, 1500, 288) ==
        std::array<std::uint8_t, 9>{0x59, 0x59, 0x41, 0x00, 0xDC, 0x05, 0x20, 0x01, 0xF5});
  // all-zero payload: checksum is just the two header bytes, 0x59+0x59=0xB2
  CHECK(encode_frame(0, 0, 0) ==
        std::array<std::uint8_t, 9>{0x59, 0x59, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0xB2});
}

TEST_CASE("encode rejects fields wider than 16 bits") {
  CHECK_THROWS_AS(encode_frame(0x10000, 0, 0), std::invalid_argument);
  CHECK_THROWS_AS(encode_frame(0, 0x10000, 0), std::invalid_argument);
  CHECK_THROWS_AS(encode_frame(0, 0, 0x10000), std::invalid_argument);
}

TEST_CASE("round-trip identity over random field triples") {
  SplitMix64 rng(11);
  std::vector<std::uint8_t> stream;
  std::vector<LidarFrame> expected;
  for (int i = 0; i < 1000; ++i) {
    const auto d = static_cast<std::uint16_t>(rng.uniform_u64(0, 0xFFFF));
    const auto s = static_cast<std::uint16_t>(rng.uniform_u64(0, 0xFFFF));
    const auto t = static_cast<std::uint16_t>(rng.uniform_u64(0, 0xFFFF));
    const auto bytes = encode_frame(d, s, t);
    stream.insert(stream.end(), bytes.begin(), bytes.end());
    expected.push_back({d, s, t, true});
  }
  auto [frames, stats] = decode_stream(stream);
  CHECK(frames == expected);
  CHECK(stats.frames_ok == 1000);
  CHECK(stats.bytes_skipped_resync == 0);
}

TEST_CASE("bad checksum is surfaced, not dropped") {
  auto bytes = naive_frame(100, 400, 2304);
  bytes[8] ^= 0xFF;
  auto [frames, stats] = decode_stream(bytes);
  REQUIRE(frames.size() == 1);
  CHECK_FALSE(frames[0].checksum_ok);
  CHECK(frames[0].distance_cm == 100);
  CHECK(stats.frames_bad_checksum == 1);
  CHECK(stats.frames_ok == 0);
}

TEST_CASE("decode is total on arbitrary bytes and conserves the byte count") {
  SplitMix64 rng(13);
  for (int iter = 0; iter < 10000; ++iter) {
    const auto len = rng.uniform_u64(0, 64);
    std::vector<std::uint8_t> bytes(len);
    for (auto& b : bytes) b = static_cast<std::uint8_t>(rng.uniform_u64(0, 255));

    FrameDecoder decoder;
    decoder.push(bytes);
    const auto& st = decoder.stats();
    const auto accounted = (st.frames_ok + st.frames_bad_checksum) * kFrameLength +
                           st.bytes_skipped_resync + decoder.pending_bytes();
    CHECK(accounted == bytes.size());
  }
}

TEST_CASE("incremental feeding emits the same frames as one-shot decoding") {
  SplitMix64 rng(17);
  std::vector<std::uint8_t> stream;
  for (int i = 0; i < 40; ++i) {
    if (rng.bernoulli(0.2)) stream.push_back(static_cast<std::uint8_t>(rng.uniform_u64(0, 255)));
    const auto f = naive_frame(static_cast<std::uint16_t>(rng.uniform_u64(20, 800)),
                               static_cast<std::uint16_t>(rng.uniform_u64(0, 3000)),
                               static_cast<std::uint16_t>(rng.uniform_u64(2000, 2500)));
    stream.insert(stream.end(), f.begin(), f.end());
  }

  auto [whole, whole_stats] = decode_stream(stream);

  for (int split_iter = 0; split_iter < 20; ++split_iter) {
    FrameDecoder dec;
    std::vector<LidarFrame> collected;
    std::size_t pos = 0;
    while (pos < stream.size()) {
      const auto chunk = std::min<std::size_t>(rng.uniform_u64(1, 23), stream.size() - pos);
      const auto before = collected;
      auto emitted = dec.push(std::span(stream).subspan(pos, chunk));
      // already-emitted frames never change once new bytes arrive
      collected.insert(collected.end(), emitted.begin(), emitted.end());
      REQUIRE(std::equal(before.begin(), before.end(), collected.begin()));
      pos += chunk;
    }
    CHECK(collected == whole);
    CHECK(dec.stats().frames_ok == whole_stats.frames_ok);
    CHECK(dec.stats().bytes_skipped_resync == whole_stats.bytes_skipped_resync);
  }
}

TEST_CASE("single-byte corruption never skips more than a frame's worth of bytes") {
  // Craft a stream whose payload bytes are never 0x59, so the only header
  // pairs are real frame starts; see the resync bound check below.
  SplitMix64 rng(19);
  std::vector<std::uint8_t> stream;
  int made = 0;
  while (made < 100) {
    const auto d = static_cast<std::uint16_t>(rng.uniform_u64(20, 800));
    const auto s = static_cast<std::uint16_t>(rng.uniform_u64(0, 0xFFFF));
    const auto t = static_cast<std::uint16_t>(rng.uniform_u64(0, 0xFFFF));
    const auto f = naive_frame(d, s, t);
    bool has59 = false;
    for (std::size_t i = 2; i < f.size(); ++i) has59 = has59 || f[i] == 0x59;
    if (has59) continue;
    stream.insert(stream.end(), f.begin(), f.end());
    ++made;
  }
  REQUIRE(stream.size() == 900);

  for (std::size_t pos = 0; pos < stream.size(); ++pos) {
    for (int delta = 1; delta < 256; ++delta) {
      auto mutated = stream;
      mutated[pos] = static_cast<std::uint8_t>(mutated[pos] + delta);

      FrameDecoder dec;
      const auto frames = dec.push(mutated);
      const auto& st = dec.stats();

      // One corrupted byte may cost the frame containing it, nothing more,
      // and resynchronization may skip at most frame_length-1 bytes plus
      // the corrupted byte itself.
      CHECK(st.bytes_skipped_resync <= kFrameLength);
      CHECK(st.frames_ok >= 99);
      CHECK(st.frames_ok + st.frames_bad_checksum <= 100);
      const auto accounted = (st.frames_ok + st.frames_bad_checksum) * kFrameLength +
                             st.bytes_skipped_resync + dec.pending_bytes();
      CHECK(accounted == mutated.size());
      (void)frames;
    }
  }
}
