#pragma once

#include <cstdint>
#include <vector>

#include "gale/blockcodec.hpp"

namespace gale {

// Byte-level container for oracle streams:
//   magic "GALE" | version 0x01 | mode byte (0x00 passthrough, 0x01
//   block-coded) | model id + parameters | k_max as u16le (0 = paper
//   schedule) | block count as u32le | payload bit length as u64le | payload
//   bytes, bits packed most-significant-first, final byte zero-padded.
std::vector<std::uint8_t> write_container(const OracleStream& stream);

// Parses and validates a container. Throws MalformedCode on bad magic,
// version, model bytes, length mismatch, or nonzero padding.
OracleStream read_container(const std::vector<std::uint8_t>& bytes);

}  // namespace gale
