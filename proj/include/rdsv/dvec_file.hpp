#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "rdsv/embedding.hpp"

namespace rdsv {

// DVEC1 layout (little-endian):
//   "DVEC1\n" | file_id (u16 len + UTF-8) | dim u32 | count u32 | rate f64 |
//   sample_rate u32 | vad_count u32 | vad_count x (orig_start, orig_end, concat_start) f64 |
//   count x dim f32, row-major
inline constexpr std::string_view kDvecMagic = "DVEC1\n";
// Loaded vectors may deviate from unit norm by at most this much.
inline constexpr double kFileNormTolerance = 1e-4;

std::vector<std::uint8_t> encode_dvec(const EmbeddingSequence& seq);
// Validates magic, sizes, rate bounds, the window-count formula and vector norms.
EmbeddingSequence decode_dvec(std::span<const std::uint8_t> bytes, const std::string& context = "DVEC1");

void write_dvec(const EmbeddingSequence& seq, const std::string& path);
EmbeddingSequence read_dvec(const std::string& path);

}  // namespace rdsv
