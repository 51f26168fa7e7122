#pragma once

#include <istream>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "rdsv/common.hpp"

namespace rdsv {

struct RttmSegment {
  std::string file_id;
  double onset = 0.0;     // seconds
  double duration = 0.0;  // seconds, > 0
  std::string speaker;

  double end() const { return onset + duration; }
  bool operator==(const RttmSegment&) const = default;
};

// Speaker timeline of one recording. Segments are kept sorted by
// (onset, speaker); call normalize() to merge touching same-speaker runs.
struct Annotation {
  std::string file_id;
  std::vector<RttmSegment> segments;

  void add(double onset, double duration, std::string speaker);
  void sort();
  // Merges same-speaker segments separated by at most merge_gap seconds
  // (overlapping ones included), then sorts.
  void normalize(double merge_gap = 0.0);

  std::set<std::string> speakers() const;
  // Speaker of the first segment (in sorted order) covering t, if any.
  std::optional<std::string> speaker_at(double t) const;
  double total_duration() const;  // sum of segment durations
  double extent() const;          // latest segment end, 0 when empty
  bool empty() const { return segments.empty(); }
  bool operator==(const Annotation&) const = default;
};

// Parses SPEAKER records; lines starting with ";;" and blank lines are skipped.
// Returns one annotation per file_id, in order of first appearance.
std::vector<Annotation> parse_rttm(std::istream& in);
std::vector<Annotation> parse_rttm(std::string_view text);
std::vector<Annotation> read_rttm_file(const std::string& path);

std::string serialize_rttm(const Annotation& annotation);
void write_rttm_file(const Annotation& annotation, const std::string& path);

// Casts every speaker outside `known` to `unk_label`, then normalizes.
Annotation relabel_unreferenced(const Annotation& annotation, const std::set<std::string>& known,
                                const std::string& unk_label = "UNK");

}  // namespace rdsv
