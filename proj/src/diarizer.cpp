#include "rdsv/diarizer.hpp"

#include <algorithm>
#include <cstdio>
#include <limits>

#include "rdsv/error.hpp"
#include "rdsv/parallel.hpp"

namespace rdsv {

std::string_view unknown_rule_name(UnknownRule rule) {
  return rule == UnknownRule::paper_literal ? "paper_literal" : "margin_below";
}

UnknownRule parse_unknown_rule(std::string_view name) {
  if (name == "paper_literal") return UnknownRule::paper_literal;
  if (name == "margin_below") return UnknownRule::margin_below;
  fail(Errc::config, "unknown rule '" + std::string(name) + "' (expected paper_literal or margin_below)");
}

void DiarizerConfig::validate() const {
  if (!(score_thresh >= 0.0 && score_thresh <= 1.0)) fail(Errc::config, "score_thresh must lie in [0, 1]");
  if (!(sim_thresh >= 0.0 && sim_thresh <= 1.0)) fail(Errc::config, "sim_thresh must lie in [0, 1]");
  if (!(min_segment_s >= 0.0)) fail(Errc::config, "min_segment_s must be non-negative");
  if (unk_label.empty() || unk_label.find_first_of(" \t\r\n") != std::string::npos)
    fail(Errc::config, "unknown label must be a non-empty token");
}

AffinityMatrix affinity(const ReferenceAudioLibrary& lib, const EmbeddingSequence& seq, unsigned jobs) {
  if (lib.dim != seq.dim)
    fail(Errc::dim_mismatch, "library dimension " + std::to_string(lib.dim) + " differs from sequence dimension " +
                                 std::to_string(seq.dim));
  AffinityMatrix aff;
  for (const auto& [speaker, refs] : lib.entries)
    for (std::size_t k = 0; k < refs.size(); ++k) aff.refs.push_back({speaker, k});
  aff.n_refs = aff.refs.size();
  aff.n_steps = seq.vectors.size();
  aff.scores.assign(aff.n_refs * aff.n_steps, 0.0);

  std::vector<const DVector*> ref_vectors;
  for (const auto& [speaker, refs] : lib.entries)
    for (const auto& v : refs) ref_vectors.push_back(&v);

  parallel_for(aff.n_steps, jobs, [&](std::size_t t) {
    for (std::size_t r = 0; r < aff.n_refs; ++r) aff.scores[r * aff.n_steps + t] = dot(*ref_vectors[r], seq.vectors[t]);
  });
  return aff;
}

SpeakerScores reduce_per_speaker(const AffinityMatrix& aff) {
  SpeakerScores out;
  for (const auto& ref : aff.refs) out.speakers.push_back(ref.speaker);
  std::sort(out.speakers.begin(), out.speakers.end());
  out.speakers.erase(std::unique(out.speakers.begin(), out.speakers.end()), out.speakers.end());
  out.n_steps = aff.n_steps;
  out.scores.assign(out.speakers.size() * out.n_steps, -std::numeric_limits<double>::infinity());
  for (std::size_t r = 0; r < aff.n_refs; ++r) {
    const auto s = static_cast<std::size_t>(
        std::lower_bound(out.speakers.begin(), out.speakers.end(), aff.refs[r].speaker) - out.speakers.begin());
    for (std::size_t t = 0; t < aff.n_steps; ++t) {
      double& cell = out.scores[s * out.n_steps + t];
      cell = std::max(cell, aff.at(r, t));
    }
  }
  return out;
}

bool is_unknown(double best, double second, const DiarizerConfig& cfg) {
  if (!(best < cfg.score_thresh)) return false;
  const double margin = best - second;
  return cfg.unknown_rule == UnknownRule::paper_literal ? margin > cfg.sim_thresh : margin < cfg.sim_thresh;
}

std::vector<std::string> label_timesteps(const SpeakerScores& scores, const DiarizerConfig& cfg) {
  cfg.validate();
  const std::size_t n_speakers = scores.speakers.size();
  if (n_speakers < 2) fail(Errc::config, "open-set labelling needs at least two library speakers");
  if (std::find(scores.speakers.begin(), scores.speakers.end(), cfg.unk_label) != scores.speakers.end())
    fail(Errc::config, "unknown label '" + cfg.unk_label + "' collides with a library speaker");

  std::vector<std::string> labels(scores.n_steps);
  for (std::size_t t = 0; t < scores.n_steps; ++t) {
    std::size_t best_idx = 0;
    for (std::size_t s = 1; s < n_speakers; ++s)
      if (scores.at(s, t) > scores.at(best_idx, t)) best_idx = s;
    double second = -std::numeric_limits<double>::infinity();
    for (std::size_t s = 0; s < n_speakers; ++s)
      if (s != best_idx) second = std::max(second, scores.at(s, t));
    const double best = scores.at(best_idx, t);
    labels[t] = is_unknown(best, second, cfg) ? cfg.unk_label : scores.speakers[best_idx];
  }
  return labels;
}

Annotation assemble_hypothesis(const std::vector<std::string>& labels, const EmbeddingSequence& seq,
                               const DiarizerConfig& cfg) {
  if (labels.size() != seq.vectors.size())
    fail(Errc::bounds, "got " + std::to_string(labels.size()) + " labels for " + std::to_string(seq.vectors.size()) +
                           " windows");
  Annotation out{seq.file_id, {}};
  if (labels.empty()) return out;

  struct Run {
    std::string label;
    std::size_t first;
    std::size_t last;
  };
  std::vector<Run> raw;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (!raw.empty() && raw.back().label == labels[i]) {
      raw.back().last = i;
    } else {
      raw.push_back({labels[i], i, i});
    }
  }

  const double win = window_seconds(seq.rate);
  auto is_short = [&](const Run& r) {
    const double len = static_cast<double>(r.last - r.first + 1) * win;
    return cfg.min_segment_s > 0.0 && len < cfg.min_segment_s - kTimeEps;
  };
  // Short leading runs have no previous label; they take the first long
  // run's label instead (or keep their own when every run is short), so every
  // window stays labelled.
  const auto first_long = std::find_if(raw.begin(), raw.end(), [&](const Run& r) { return !is_short(r); });
  if (first_long != raw.end())
    for (auto it = raw.begin(); it != first_long; ++it) it->label = first_long->label;

  std::vector<Run> runs;
  for (auto& r : raw) {
    const bool short_run = is_short(r);
    if (!runs.empty() && (short_run || runs.back().label == r.label)) {
      runs.back().last = r.last;
    } else {
      runs.push_back(std::move(r));
    }
  }

  const std::size_t width = window_frames(seq.rate);
  for (const auto& r : runs) {
    const double begin = static_cast<double>(r.first * width) / kFramesPerSecond;
    const double end = static_cast<double>((r.last + 1) * width) / kFramesPerSecond;
    const auto pieces = seq.vad.empty() ? std::vector<std::pair<double, double>>{{begin, end}}
                                        : map_concat_interval(seq.vad, begin, end);
    for (const auto& [b, e] : pieces) out.add(b, e - b, r.label);
  }
  out.normalize();
  return out;
}

Annotation diarize(const ReferenceAudioLibrary& lib, const EmbeddingSequence& seq, const DiarizerConfig& cfg,
                   unsigned jobs) {
  cfg.validate();
  if (lib.speakers().contains(cfg.unk_label))
    fail(Errc::config, "unknown label '" + cfg.unk_label + "' collides with a library speaker");
  if (seq.empty()) {
    if (lib.dim != seq.dim) fail(Errc::dim_mismatch, "library and sequence dimensions differ");
    return Annotation{seq.file_id, {}};
  }
  const auto scores = reduce_per_speaker(affinity(lib, seq, jobs));
  return assemble_hypothesis(label_timesteps(scores, cfg), seq, cfg);
}

std::string segment_dump(const Annotation& annotation) {
  std::string out;
  char buf[64];
  for (const auto& s : annotation.segments) {
    std::snprintf(buf, sizeof(buf), "%.3f\t%.3f\t", s.onset, s.end());
    out += buf;
    out += s.speaker;
    out += '\n';
  }
  return out;
}

}  // namespace rdsv
