#include "rdsv/dvec_file.hpp"

#include <cmath>

#include "binary.hpp"
#include "rdsv/error.hpp"
#include "rdsv/fileio.hpp"

namespace rdsv {

std::vector<std::uint8_t> encode_dvec(const EmbeddingSequence& seq) {
  detail::ByteWriter w;
  w.raw(kDvecMagic);
  w.str16(seq.file_id);
  w.u32(static_cast<std::uint32_t>(seq.dim));
  w.u32(static_cast<std::uint32_t>(seq.vectors.size()));
  w.f64(seq.rate);
  w.u32(static_cast<std::uint32_t>(seq.sample_rate));
  w.u32(static_cast<std::uint32_t>(seq.vad.segments.size()));
  for (const auto& s : seq.vad.segments) {
    w.f64(s.orig_start);
    w.f64(s.orig_end);
    w.f64(s.concat_start);
  }
  for (const auto& v : seq.vectors) {
    if (v.dim() != seq.dim) fail(Errc::dim_mismatch, "vector dimension differs from sequence dimension");
    for (float x : v.values()) w.f32(x);
  }
  return w.take();
}

EmbeddingSequence decode_dvec(std::span<const std::uint8_t> bytes, const std::string& context) {
  detail::ByteReader r(bytes, context);
  if (!r.starts_with(kDvecMagic)) fail(Errc::bad_magic, context + ": missing DVEC1 magic");
  r.skip(kDvecMagic.size());

  EmbeddingSequence seq;
  seq.file_id = r.str16();
  seq.dim = r.u32();
  const std::uint32_t count = r.u32();
  seq.rate = r.f64();
  seq.sample_rate = static_cast<int>(r.u32());
  const std::uint32_t vad_count = r.u32();

  if (seq.dim == 0) fail(Errc::dim_mismatch, context + ": dimension is zero");
  if (!(seq.rate >= kMinRate && seq.rate <= kMaxRate)) fail(Errc::format, context + ": rate out of bounds [0.625,100]");

  double concat = 0.0;
  for (std::uint32_t k = 0; k < vad_count; ++k) {
    VadSegment s;
    s.orig_start = r.f64();
    s.orig_end = r.f64();
    s.concat_start = r.f64();
    if (!(s.orig_end > s.orig_start) || (!seq.vad.segments.empty() && s.orig_start < seq.vad.segments.back().orig_end))
      fail(Errc::format, context + ": VAD segments must be positive-length, sorted and disjoint");
    if (std::abs(s.concat_start - concat) > 1e-6)
      fail(Errc::format, context + ": VAD concat offsets are not contiguous at segment " + std::to_string(k));
    concat += s.duration();
    seq.vad.segments.push_back(s);
  }

  const std::size_t payload = static_cast<std::size_t>(count) * seq.dim * 4;
  if (r.remaining() < payload)
    fail(Errc::truncated, context + ": payload truncated (" + std::to_string(r.remaining()) + " of " +
                              std::to_string(payload) + " bytes)");
  if (r.remaining() > payload) fail(Errc::count_mismatch, context + ": trailing bytes after payload");
  if (!window_count_consistent(count, seq.rate, seq.vad.total_speech()))
    fail(Errc::count_mismatch, context + ": " + std::to_string(count) + " vectors inconsistent with " +
                                   std::to_string(seq.vad.total_speech()) + " s of speech at rate " +
                                   std::to_string(seq.rate));

  seq.vectors.reserve(count);
  std::vector<float> buf(seq.dim);
  for (std::uint32_t i = 0; i < count; ++i) {
    for (auto& x : buf) x = r.f32();
    DVector v(buf);
    const double n = v.norm();
    if (!std::isfinite(n) || std::abs(n - 1.0) > kFileNormTolerance)
      fail(Errc::norm, context + ": vector " + std::to_string(i) + " has norm " + std::to_string(n));
    seq.vectors.push_back(std::move(v));
  }
  return seq;
}

void write_dvec(const EmbeddingSequence& seq, const std::string& path) { write_file_atomic(path, encode_dvec(seq)); }

EmbeddingSequence read_dvec(const std::string& path) { return decode_dvec(read_file_bytes(path), path); }

}  // namespace rdsv
