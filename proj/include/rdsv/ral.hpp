#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "rdsv/embedding.hpp"
#include "rdsv/rttm.hpp"

namespace rdsv {

struct RalConfig {
  double min_audio_len = 1.0;  // seconds of annotated interval
  std::size_t min_ref_count = 5;
  // Speakers eligible for the library; nullopt admits everyone.
  std::optional<std::set<std::string>> allowlist;
};

// Reference Audio Library: speaker -> one reference d-vector per retained
// speaking interval, ordered by (file_id, onset).
struct ReferenceAudioLibrary {
  std::size_t dim = kDefaultDim;
  std::map<std::string, std::vector<DVector>> entries;

  std::set<std::string> speakers() const;
  std::size_t reference_count() const;
  bool operator==(const ReferenceAudioLibrary&) const = default;
};

struct ReferenceCase {
  EmbeddingSequence embeddings;
  Annotation annotation;
};

// Indices of windows whose original-time span lies inside [onset, onset + duration].
std::vector<std::size_t> interval_windows(const EmbeddingSequence& seq, double onset, double duration);
std::vector<DVector> interval_vectors(const EmbeddingSequence& seq, double onset, double duration);

ReferenceAudioLibrary build_ral(std::span<const ReferenceCase> refs, const RalConfig& cfg, unsigned jobs = 1);

// One speaker name per line; '#' starts a comment.
std::set<std::string> parse_allowlist(std::string_view text);
std::set<std::string> read_allowlist(const std::string& path);

// RAL1 layout (little-endian):
//   "RAL1\n" | dim u32 | speaker_count u32 |
//   per speaker: name (u16 len + UTF-8) | ref_count u32 | ref_count x dim f32
inline constexpr std::string_view kRalMagic = "RAL1\n";

std::vector<std::uint8_t> encode_ral(const ReferenceAudioLibrary& lib);
ReferenceAudioLibrary decode_ral(std::span<const std::uint8_t> bytes, const std::string& context = "RAL1");
void write_ral(const ReferenceAudioLibrary& lib, const std::string& path);
ReferenceAudioLibrary read_ral(const std::string& path);

}  // namespace rdsv
