#include "rdsv/ral.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>

#include "binary.hpp"
#include "rdsv/dvec_file.hpp"
#include "rdsv/error.hpp"
#include "rdsv/fileio.hpp"
#include "rdsv/parallel.hpp"

namespace rdsv {

std::set<std::string> ReferenceAudioLibrary::speakers() const {
  std::set<std::string> out;
  for (const auto& [name, refs] : entries) out.insert(name);
  return out;
}

std::size_t ReferenceAudioLibrary::reference_count() const {
  std::size_t n = 0;
  for (const auto& [name, refs] : entries) n += refs.size();
  return n;
}

std::vector<std::size_t> interval_windows(const EmbeddingSequence& seq, double onset, double duration) {
  const double end = onset + duration;
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < seq.vectors.size(); ++i) {
    const auto [b, e] = time_of(seq, i);
    if (b >= end) break;
    if (b >= onset - kTimeEps && e <= end + kTimeEps) out.push_back(i);
  }
  return out;
}

std::vector<DVector> interval_vectors(const EmbeddingSequence& seq, double onset, double duration) {
  std::vector<DVector> out;
  for (auto i : interval_windows(seq, onset, duration)) out.push_back(seq.vectors[i]);
  return out;
}

namespace {

struct Candidate {
  std::string speaker;
  std::string file_id;
  double onset;
  double duration;
  DVector reference;
};

}  // namespace

ReferenceAudioLibrary build_ral(std::span<const ReferenceCase> refs, const RalConfig& cfg, unsigned jobs) {
  if (!(cfg.min_audio_len > 0.0)) fail(Errc::config, "min_audio_len must be positive");
  if (cfg.min_ref_count < 1) fail(Errc::config, "min_ref_count must be at least 1");
  if (refs.empty()) fail(Errc::build, "no reference cases supplied");

  const std::size_t dim = refs.front().embeddings.dim;
  for (const auto& rc : refs) {
    if (rc.embeddings.dim != dim)
      fail(Errc::config, "dimension mismatch: '" + rc.embeddings.file_id + "' has dim " +
                             std::to_string(rc.embeddings.dim) + ", expected " + std::to_string(dim));
    if (!rc.annotation.empty() && rc.annotation.file_id != rc.embeddings.file_id)
      fail(Errc::config, "annotation '" + rc.annotation.file_id + "' is paired with embeddings '" +
                             rc.embeddings.file_id + "'");
  }

  std::vector<std::vector<Candidate>> per_case(refs.size());
  parallel_for(refs.size(), jobs, [&](std::size_t c) {
    const auto& seq = refs[c].embeddings;
    for (const auto& seg : refs[c].annotation.segments) {
      if (cfg.allowlist && !cfg.allowlist->contains(seg.speaker)) continue;
      if (seg.duration < cfg.min_audio_len) continue;
      const auto idx = interval_windows(seq, seg.onset, seg.duration);
      if (idx.empty()) continue;
      std::vector<double> mean(dim, 0.0);
      for (auto i : idx) {
        const auto v = seq.vectors[i].values();
        for (std::size_t k = 0; k < dim; ++k) mean[k] += v[k];
      }
      for (auto& m : mean) m /= static_cast<double>(idx.size());
      per_case[c].push_back({seg.speaker, seq.file_id, seg.onset, seg.duration, DVector::normalized(mean)});
    }
  });

  std::map<std::string, std::vector<Candidate>> grouped;
  for (auto& list : per_case)
    for (auto& cand : list) grouped[cand.speaker].push_back(std::move(cand));

  ReferenceAudioLibrary lib;
  lib.dim = dim;
  for (auto& [speaker, list] : grouped) {
    if (list.size() < cfg.min_ref_count) continue;
    std::sort(list.begin(), list.end(), [](const Candidate& a, const Candidate& b) {
      return std::tie(a.file_id, a.onset, a.duration) < std::tie(b.file_id, b.onset, b.duration);
    });
    auto& out = lib.entries[speaker];
    for (auto& cand : list) out.push_back(std::move(cand.reference));
  }
  if (lib.entries.empty()) fail(Errc::build, "reference library is empty: no speaker met the retention rules");
  return lib;
}

std::set<std::string> parse_allowlist(std::string_view text) {
  std::set<std::string> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(pos, nl - pos);
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    const auto b = line.find_first_not_of(" \t\r");
    if (b != std::string_view::npos) {
      const auto e = line.find_last_not_of(" \t\r");
      out.emplace(line.substr(b, e - b + 1));
    }
    pos = nl + 1;
  }
  return out;
}

std::set<std::string> read_allowlist(const std::string& path) { return parse_allowlist(read_file_text(path)); }

std::vector<std::uint8_t> encode_ral(const ReferenceAudioLibrary& lib) {
  detail::ByteWriter w;
  w.raw(kRalMagic);
  w.u32(static_cast<std::uint32_t>(lib.dim));
  w.u32(static_cast<std::uint32_t>(lib.entries.size()));
  for (const auto& [name, refs] : lib.entries) {
    w.str16(name);
    w.u32(static_cast<std::uint32_t>(refs.size()));
    for (const auto& v : refs) {
      if (v.dim() != lib.dim) fail(Errc::dim_mismatch, "reference for '" + name + "' has the wrong dimension");
      for (float x : v.values()) w.f32(x);
    }
  }
  return w.take();
}

ReferenceAudioLibrary decode_ral(std::span<const std::uint8_t> bytes, const std::string& context) {
  detail::ByteReader r(bytes, context);
  if (!r.starts_with(kRalMagic)) fail(Errc::bad_magic, context + ": missing RAL1 magic");
  r.skip(kRalMagic.size());
  ReferenceAudioLibrary lib;
  lib.dim = r.u32();
  const std::uint32_t n_speakers = r.u32();
  if (lib.dim == 0) fail(Errc::dim_mismatch, context + ": dimension is zero");
  if (n_speakers == 0) fail(Errc::build, context + ": reference library is empty");

  std::vector<float> buf(lib.dim);
  for (std::uint32_t s = 0; s < n_speakers; ++s) {
    std::string name = r.str16();
    if (name.empty()) fail(Errc::format, context + ": empty speaker name");
    if (lib.entries.contains(name)) fail(Errc::duplicate, context + ": duplicate speaker '" + name + "'");
    const std::uint32_t n_refs = r.u32();
    if (n_refs == 0) fail(Errc::format, context + ": speaker '" + name + "' has no references");
    if (r.remaining() / 4 / lib.dim < n_refs) fail(Errc::truncated, context + ": truncated references for '" + name + "'");
    auto& refs = lib.entries[name];
    refs.reserve(n_refs);
    for (std::uint32_t k = 0; k < n_refs; ++k) {
      for (auto& x : buf) x = r.f32();
      DVector v(buf);
      const double n = v.norm();
      if (!std::isfinite(n) || std::abs(n - 1.0) > kFileNormTolerance)
        fail(Errc::norm, context + ": reference " + std::to_string(k) + " of '" + name + "' has norm " + std::to_string(n));
      refs.push_back(std::move(v));
    }
  }
  if (r.remaining() != 0) fail(Errc::format, context + ": trailing bytes after last speaker");
  return lib;
}

void write_ral(const ReferenceAudioLibrary& lib, const std::string& path) { write_file_atomic(path, encode_ral(lib)); }

ReferenceAudioLibrary read_ral(const std::string& path) { return decode_ral(read_file_bytes(path), path); }

}  // namespace rdsv
