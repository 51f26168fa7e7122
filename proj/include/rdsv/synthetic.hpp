#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "rdsv/embedders.hpp"
#include "rdsv/ral.hpp"

namespace rdsv {

struct CorpusConfig {
  std::size_t n_speakers = 12;
  std::size_t n_referenced = 9;  // the first n_referenced profiles
  std::size_t dim = kDefaultDim;
  double rate = 5.0;
  std::size_t cases = 5;
  double case_duration_s = 300.0;
  double turn_min_s = 2.0;
  double turn_max_s = 20.0;
  std::uint64_t seed = 1;
  double kappa = kZeroNoise;
  double min_pairwise_angle_deg = 60.0;
  std::size_t max_retries = 10000;  // per profile
  // Optional named partitions (e.g. ref/dev/test) with case counts; when
  // empty, `cases` cases are written to the output root.
  std::vector<std::pair<std::string, std::size_t>> splits;
  std::uint64_t first_case_index = 0;

  void validate() const;
};

// Profiles spk01..spkNN with non-negative unit mean directions whose pairwise
// angles are at least min_pairwise_angle_deg.
std::vector<SpeakerProfile> gen_profiles(const CorpusConfig& cfg);

std::string case_file_id(std::uint64_t case_index);

// Alternating-turn timeline tiling [0, case_duration_s] (turn edges on whole
// milliseconds, no immediate self-transition) and its synthetic embeddings.
ReferenceCase gen_case(const CorpusConfig& cfg, const std::vector<SpeakerProfile>& profiles,
                       std::uint64_t case_index, unsigned jobs = 1);

struct CorpusSplit {
  std::string name;
  std::vector<ReferenceCase> cases;
};

struct Corpus {
  std::vector<SpeakerProfile> profiles;
  std::vector<std::string> referenced;
  std::vector<CorpusSplit> splits;
};

Corpus gen_corpus(const CorpusConfig& cfg, unsigned jobs = 1);

// Writes <split>/<file_id>.dvec and .rttm per case plus manifest.json and
// allowlist.txt (referenced speakers) at the root of out_dir.
void write_corpus(const Corpus& corpus, const CorpusConfig& cfg, const std::string& out_dir);

CorpusConfig corpus_config_from_json(const std::string& text);
std::string corpus_config_to_json(const CorpusConfig& cfg);

}  // namespace rdsv
