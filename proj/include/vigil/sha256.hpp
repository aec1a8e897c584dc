#pragma once

#include <cstdint>
#include <span>
#include <string>

namespace vigil {

/// FIPS 180-4 SHA-256, hex-encoded. Used for the input/output digests in
/// run manifests; self-contained so manifests hash identically everywhere.
std::string sha256_hex(std::span<const std::uint8_t> data);
std::string sha256_hex(const std::string& data);
std::string sha256_file_hex(const std::string& path);

}  // namespace vigil
