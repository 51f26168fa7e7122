#pragma once

#include <string>
#include <utility>
#include <vector>

#include "rdsv/embedding.hpp"
#include "rdsv/ral.hpp"
#include "rdsv/rttm.hpp"

namespace rdsv {

// How the margin between the best and second-best speaker enters the
// unknown-speaker decision (both require best < score_thresh):
//   paper_literal: unknown iff margin > sim_thresh
//   margin_below:  unknown iff margin < sim_thresh
enum class UnknownRule { paper_literal, margin_below };

std::string_view unknown_rule_name(UnknownRule rule);
UnknownRule parse_unknown_rule(std::string_view name);

struct DiarizerConfig {
  double score_thresh = 0.85;
  double sim_thresh = 0.1;
  std::string unk_label = "UNK";
  double min_segment_s = 0.0;
  UnknownRule unknown_rule = UnknownRule::paper_literal;

  void validate() const;
};

struct ReferenceIndex {
  std::string speaker;
  std::size_t ordinal = 0;
};

// scores[r * n_steps + t] = <reference r, window t>.
struct AffinityMatrix {
  std::size_t n_refs = 0;
  std::size_t n_steps = 0;
  std::vector<double> scores;
  std::vector<ReferenceIndex> refs;

  double at(std::size_t r, std::size_t t) const { return scores[r * n_steps + t]; }
};

// Per-speaker maximum over that speaker's reference rows. Speakers are sorted
// by name; scores[s * n_steps + t].
struct SpeakerScores {
  std::vector<std::string> speakers;
  std::size_t n_steps = 0;
  std::vector<double> scores;

  double at(std::size_t s, std::size_t t) const { return scores[s * n_steps + t]; }
};

AffinityMatrix affinity(const ReferenceAudioLibrary& lib, const EmbeddingSequence& seq, unsigned jobs = 1);
SpeakerScores reduce_per_speaker(const AffinityMatrix& aff);

// Decision for a single timestep given its best and second-best scores.
bool is_unknown(double best, double second, const DiarizerConfig& cfg);

std::vector<std::string> label_timesteps(const SpeakerScores& scores, const DiarizerConfig& cfg);

Annotation assemble_hypothesis(const std::vector<std::string>& labels, const EmbeddingSequence& seq,
                               const DiarizerConfig& cfg);

Annotation diarize(const ReferenceAudioLibrary& lib, const EmbeddingSequence& seq, const DiarizerConfig& cfg,
                   unsigned jobs = 1);

// "onset<TAB>end<TAB>speaker" per line.
std::string segment_dump(const Annotation& annotation);

}  // namespace rdsv
