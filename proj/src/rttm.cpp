#include "rdsv/rttm.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "rdsv/error.hpp"
#include "rdsv/fileio.hpp"

namespace rdsv {

namespace {

bool parse_double(std::string_view token, double& out) {
  const char* first = token.data();
  const char* last = token.data() + token.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last;
}

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
    if (j > i) fields.push_back(line.substr(i, j - i));
    i = j;
  }
  return fields;
}

bool segment_less(const RttmSegment& a, const RttmSegment& b) {
  if (a.onset != b.onset) return a.onset < b.onset;
  if (a.speaker != b.speaker) return a.speaker < b.speaker;
  return a.duration < b.duration;
}

}  // namespace

void Annotation::add(double onset, double duration, std::string speaker) {
  segments.push_back(RttmSegment{file_id, onset, duration, std::move(speaker)});
}

void Annotation::sort() { std::sort(segments.begin(), segments.end(), segment_less); }

void Annotation::normalize(double merge_gap) {
  std::map<std::string, std::vector<RttmSegment>> by_speaker;
  for (auto& s : segments) by_speaker[s.speaker].push_back(std::move(s));
  segments.clear();
  for (auto& [speaker, list] : by_speaker) {
    std::sort(list.begin(), list.end(), segment_less);
    RttmSegment cur = list.front();
    for (std::size_t i = 1; i < list.size(); ++i) {
      const auto& next = list[i];
      if (next.onset <= cur.end() + merge_gap + kTimeEps) {
        const double end = std::max(cur.end(), next.end());
        cur.duration = end - cur.onset;
      } else {
        segments.push_back(cur);
        cur = next;
      }
    }
    segments.push_back(cur);
  }
  sort();
}

std::set<std::string> Annotation::speakers() const {
  std::set<std::string> out;
  for (const auto& s : segments) out.insert(s.speaker);
  return out;
}

std::optional<std::string> Annotation::speaker_at(double t) const {
  for (const auto& s : segments) {
    if (s.onset > t) break;
    if (t < s.end()) return s.speaker;
  }
  return std::nullopt;
}

double Annotation::total_duration() const {
  double total = 0.0;
  for (const auto& s : segments) total += s.duration;
  return total;
}

double Annotation::extent() const {
  double end = 0.0;
  for (const auto& s : segments) end = std::max(end, s.end());
  return end;
}

std::vector<Annotation> parse_rttm(std::istream& in) {
  std::vector<Annotation> out;
  std::map<std::string, std::size_t, std::less<>> index;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view(line);
    auto fields = split_ws(view);
    if (fields.empty()) continue;
    if (fields.front().starts_with(";;")) continue;

    const auto where = "line " + std::to_string(line_no) + ": ";
    if (fields.size() < 9) fail(Errc::parse, where + "expected at least 9 fields, found " + std::to_string(fields.size()));
    if (fields[0] != "SPEAKER") fail(Errc::parse, where + "unsupported record type '" + std::string(fields[0]) + "'");
    double onset = 0.0;
    double duration = 0.0;
    if (!parse_double(fields[3], onset)) fail(Errc::parse, where + "non-numeric onset '" + std::string(fields[3]) + "'");
    if (!parse_double(fields[4], duration))
      fail(Errc::parse, where + "non-numeric duration '" + std::string(fields[4]) + "'");
    if (!(onset >= 0.0)) fail(Errc::parse, where + "negative onset");
    if (!(duration > 0.0)) fail(Errc::parse, where + "duration must be positive");

    std::string file_id(fields[1]);
    auto it = index.find(file_id);
    if (it == index.end()) {
      it = index.emplace(file_id, out.size()).first;
      out.push_back(Annotation{file_id, {}});
    }
    out[it->second].add(onset, duration, std::string(fields[7]));
  }
  for (auto& a : out) a.sort();
  return out;
}

std::vector<Annotation> parse_rttm(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse_rttm(in);
}

std::vector<Annotation> read_rttm_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(Errc::io, "cannot open '" + path + "'");
  try {
    return parse_rttm(in);
  } catch (const Error& e) {
    fail(e.code(), path + ": " + e.what());
  }
}

std::string serialize_rttm(const Annotation& annotation) {
  std::string out;
  char buf[64];
  for (const auto& s : annotation.segments) {
    out += "SPEAKER ";
    out += annotation.file_id;
    std::snprintf(buf, sizeof(buf), " 1 %.3f %.3f <NA> <NA> ", s.onset, s.duration);
    out += buf;
    out += s.speaker;
    out += " <NA> <NA>\n";
  }
  return out;
}

void write_rttm_file(const Annotation& annotation, const std::string& path) {
  write_file_atomic(path, serialize_rttm(annotation));
}

Annotation relabel_unreferenced(const Annotation& annotation, const std::set<std::string>& known,
                                const std::string& unk_label) {
  if (known.contains(unk_label)) fail(Errc::config, "unknown label '" + unk_label + "' collides with a known speaker");
  Annotation out = annotation;
  for (auto& s : out.segments)
    if (!known.contains(s.speaker)) s.speaker = unk_label;
  if (!out.segments.empty()) out.normalize();
  return out;
}

}  // namespace rdsv
