#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ywlab/noise.hpp"

namespace ywlab {

/// Current bundle file format version.
inline constexpr std::uint32_t kBundleFormatVersion = 1;

/// Binary bundle layout, all integers and IEEE doubles little-endian:
///
///   magic "YWNB" | u32 version | u8 endianness (1 = little)
///   u64 master seed | u64 family | u64 path | u64 config digest
///   Wiener block:  u64 grid points | f64 times... | u64 modes | f64 increments (row-major, cell x mode)
///   atom block:    f64 horizon | u64 id length | id bytes | u64 dimension | u64 layers simulated
///                  f64 discarded tail bound | u64 atoms | per atom: f64 time, u64 layer, u64 seq, f64 mark...
///   initial block: u64 length | f64 values...
std::vector<std::uint8_t> serialize(const NoiseBundle& bundle);

/// Throws DecodeError on a bad magic, version mismatch, or truncated or
/// inconsistent stream.
NoiseBundle deserialize(std::span<const std::uint8_t> bytes);

void write_bundle_file(const std::string& path, const NoiseBundle& bundle);
NoiseBundle read_bundle_file(const std::string& path);

}  // namespace ywlab
