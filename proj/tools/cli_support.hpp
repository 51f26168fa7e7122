#pragma once

#include <chrono>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "rdsv/embedding.hpp"
#include "rdsv/metrics.hpp"
#include "rdsv/rttm.hpp"

namespace rdsv::cli {

// Sorted regular files in `dir` with extension `ext` (".dvec", ".rttm").
std::vector<std::string> list_files(const std::string& dir, const std::string& ext);

// Accepts a single file or a directory of files with the given extension.
std::vector<std::string> expand_inputs(const std::string& path, const std::string& ext);

// All annotations from RTTM files under `paths`, keyed by file_id.
std::map<std::string, Annotation> load_annotations(const std::vector<std::string>& paths);

std::vector<EmbeddingSequence> load_sequences(const std::string& path);

// Speaker roster from a RAL1 file or a plain allowlist.
std::set<std::string> load_roster(const std::string& path);

unsigned default_jobs();

// Sidecar written next to every output: <output>.manifest.json.
class RunManifest {
 public:
  explicit RunManifest(std::string command);
  nlohmann::json& config() { return config_; }
  void input(const std::string& path) { inputs_.push_back(path); }
  void output(const std::string& path) { outputs_.push_back(path); }
  void write(const std::string& path) const;

 private:
  std::string command_;
  nlohmann::json config_ = nlohmann::json::object();
  std::vector<std::string> inputs_;
  std::vector<std::string> outputs_;
  std::chrono::steady_clock::time_point start_;
};

nlohmann::json der_json(const DerReport& r);
nlohmann::json aggregate_json(const AggregateReport& a);

// Writes `doc` to `path`, or to stdout when path is "-".
void emit_json(const nlohmann::json& doc, const std::string& path);

}  // namespace rdsv::cli
