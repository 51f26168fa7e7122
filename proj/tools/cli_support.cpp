#include "cli_support.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <iostream>

#include "rdsv/dvec_file.hpp"
#include "rdsv/error.hpp"
#include "rdsv/fileio.hpp"
#include "rdsv/ral.hpp"

#ifndef RDSV_VERSION
#define RDSV_VERSION "0.0.0"
#endif

namespace fs = std::filesystem;

namespace rdsv::cli {

std::vector<std::string> list_files(const std::string& dir, const std::string& ext) {
  if (!fs::is_directory(dir)) fail(Errc::io, "'" + dir + "' is not a directory");
  std::vector<std::string> out;
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.is_regular_file() && entry.path().extension() == ext) out.push_back(entry.path().string());
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::string> expand_inputs(const std::string& path, const std::string& ext) {
  if (fs::is_directory(path)) return list_files(path, ext);
  if (!fs::exists(path)) fail(Errc::io, "'" + path + "' does not exist");
  return {path};
}

std::map<std::string, Annotation> load_annotations(const std::vector<std::string>& paths) {
  std::map<std::string, Annotation> out;
  for (const auto& path : paths) {
    for (const auto& file : expand_inputs(path, ".rttm")) {
      for (auto& a : read_rttm_file(file)) {
        auto& slot = out[a.file_id];
        slot.file_id = a.file_id;
        for (auto& s : a.segments) slot.segments.push_back(std::move(s));
        slot.sort();
      }
    }
  }
  return out;
}

std::vector<EmbeddingSequence> load_sequences(const std::string& path) {
  std::vector<EmbeddingSequence> out;
  for (const auto& file : expand_inputs(path, ".dvec")) out.push_back(read_dvec(file));
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.file_id < b.file_id; });
  return out;
}

std::set<std::string> load_roster(const std::string& path) {
  const auto bytes = read_file_bytes(path);
  const std::string_view head(reinterpret_cast<const char*>(bytes.data()), std::min<std::size_t>(bytes.size(), 5));
  if (head == kRalMagic) return decode_ral(bytes, path).speakers();
  return parse_allowlist(std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
}

unsigned default_jobs() {
  if (const char* env = std::getenv("RDSV_JOBS")) {
    const int n = std::atoi(env);
    if (n > 0) return static_cast<unsigned>(n);
  }
  return 1;
}

RunManifest::RunManifest(std::string command) : command_(std::move(command)), start_(std::chrono::steady_clock::now()) {}

void RunManifest::write(const std::string& path) const {
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  nlohmann::json doc;
  doc["command"] = command_;
  doc["config"] = config_;
  doc["inputs"] = inputs_;
  doc["outputs"] = outputs_;
  doc["tool_version"] = RDSV_VERSION;
  doc["wall_time_s"] = wall;
  write_file_atomic(path, doc.dump(2) + "\n");
}

nlohmann::json der_json(const DerReport& r) {
  return {{"total_ref_s", r.total_ref},
          {"missed_s", r.missed},
          {"false_alarm_s", r.false_alarm},
          {"confusion_s", r.confusion},
          {"der", r.der}};
}

nlohmann::json aggregate_json(const AggregateReport& a) {
  return {{"mean_der", a.mean_der},
          {"std_der", a.std_der},
          {"max_der", a.max_der},
          {"n", a.case_count},
          {"mean_audio_minutes", a.mean_audio_minutes},
          {"mean_speech_minutes", a.mean_speech_minutes}};
}

void emit_json(const nlohmann::json& doc, const std::string& path) {
  if (path == "-") {
    std::cout << doc.dump(2) << "\n";
  } else {
    write_file_atomic(path, doc.dump(2) + "\n");
  }
}

}  // namespace rdsv::cli
