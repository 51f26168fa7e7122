#include "rdsv/embedding.hpp"

#include <cmath>
#include <sstream>

#include "rdsv/error.hpp"
#include "rdsv/parallel.hpp"

namespace rdsv {

namespace {

template <typename T>
DVector normalize_impl(std::span<const T> raw) {
  double sq = 0.0;
  for (T v : raw) {
    if (!std::isfinite(static_cast<double>(v))) fail(Errc::norm, "cannot normalize a vector with non-finite components");
    sq += static_cast<double>(v) * static_cast<double>(v);
  }
  if (!(sq > 0.0)) fail(Errc::norm, "cannot normalize a zero vector");
  const double inv = 1.0 / std::sqrt(sq);
  std::vector<float> out(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) out[i] = static_cast<float>(static_cast<double>(raw[i]) * inv);
  return DVector(std::move(out));
}

std::string rate_string(double rate) {
  std::ostringstream ss;
  ss << rate;
  return ss.str();
}

}  // namespace

DVector DVector::normalized(std::span<const double> raw) { return normalize_impl(raw); }
DVector DVector::normalized(std::span<const float> raw) { return normalize_impl(raw); }

double DVector::norm() const {
  double sq = 0.0;
  for (float v : values_) sq += static_cast<double>(v) * v;
  return std::sqrt(sq);
}

double dot(const DVector& a, const DVector& b) {
  if (a.dim() != b.dim()) fail(Errc::dim_mismatch, "dot product of vectors with different dimensions");
  double acc = 0.0;
  const auto av = a.values();
  const auto bv = b.values();
  for (std::size_t i = 0; i < av.size(); ++i) acc += static_cast<double>(av[i]) * bv[i];
  return acc;
}

void check_rate(double rate) {
  if (!(rate >= kMinRate && rate <= kMaxRate))
    fail(Errc::range, "rate out of bounds [0.625,100]: got " + rate_string(rate));
}

std::size_t window_frames(double rate) {
  check_rate(rate);
  return static_cast<std::size_t>(std::nearbyint(kFramesPerSecond / rate));
}

double window_seconds(double rate) { return static_cast<double>(window_frames(rate)) / kFramesPerSecond; }

std::vector<FrameRange> window_plan(std::size_t n_frames, double rate) {
  const std::size_t width = window_frames(rate);
  std::vector<FrameRange> plan;
  plan.reserve(n_frames / width);
  for (std::size_t b = 0; b + width <= n_frames; b += width) plan.push_back({b, b + width});
  return plan;
}

bool window_count_consistent(std::size_t count, double rate, double speech_seconds) {
  const std::size_t width = window_frames(rate);
  const auto total = static_cast<std::size_t>(std::llround(std::max(0.0, speech_seconds) * kFramesPerSecond));
  const std::size_t lower = total >= 2 ? (total - 2) / width : 0;
  const std::size_t upper = total / width;
  return count >= lower && count <= upper;
}

double concat_to_original(const VadMap& vad, double concat_time) {
  if (vad.empty()) return concat_time;
  const VadSegment* seg = &vad.segments.front();
  for (const auto& s : vad.segments) {
    if (s.concat_start <= concat_time + kTimeEps) seg = &s;
  }
  const double t = seg->orig_start + (concat_time - seg->concat_start);
  return std::min(std::max(t, seg->orig_start), seg->orig_end);
}

std::vector<std::pair<double, double>> map_concat_interval(const VadMap& vad, double begin, double end) {
  std::vector<std::pair<double, double>> out;
  for (const auto& s : vad.segments) {
    const double cs = s.concat_start;
    const double ce = s.concat_start + s.duration();
    const double lo = std::max(begin, cs);
    const double hi = std::min(end, ce);
    if (hi - lo > kTimeEps) out.emplace_back(s.orig_start + (lo - cs), s.orig_start + (hi - cs));
  }
  return out;
}

std::pair<double, double> time_of(const EmbeddingSequence& seq, std::size_t index) {
  if (index >= seq.vectors.size())
    fail(Errc::bounds, "window index " + std::to_string(index) + " out of range (" + std::to_string(seq.vectors.size()) +
                           " windows)");
  const auto width = window_frames(seq.rate);
  const double begin = static_cast<double>(index * width) / kFramesPerSecond;
  const double end = static_cast<double>((index + 1) * width) / kFramesPerSecond;
  const auto pieces = map_concat_interval(seq.vad, begin, end);
  if (pieces.empty()) fail(Errc::bounds, "window " + std::to_string(index) + " lies outside the VAD map");
  return {pieces.front().first, pieces.back().second};
}

namespace {

EmbeddingSequence embed_impl(const MelSpectrogram* mel, std::size_t n_frames, double rate, const Embedder& embedder,
                             const VadMap& vad, std::string file_id, unsigned jobs) {
  const auto plan = window_plan(n_frames, rate);
  EmbeddingSequence seq;
  seq.file_id = std::move(file_id);
  seq.rate = rate;
  seq.dim = embedder.dim();
  seq.vad = vad;
  seq.vectors.resize(plan.size());

  auto run = [&](std::size_t i) {
    WindowInput w;
    w.index = i;
    w.frames = plan[i];
    if (mel != nullptr) w.mel = mel->frames(plan[i].begin, plan[i].end);
    w.concat_start = static_cast<double>(plan[i].begin) / kFramesPerSecond;
    w.concat_end = static_cast<double>(plan[i].end) / kFramesPerSecond;
    w.orig_midpoint = concat_to_original(vad, 0.5 * (w.concat_start + w.concat_end));
    DVector v;
    try {
      v = embedder.embed_window(w);
    } catch (const std::exception& e) {
      fail(Errc::embedder, "embedder failed at window " + std::to_string(i) + ": " + e.what());
    }
    if (v.dim() != seq.dim)
      fail(Errc::embedder, "embedder returned dimension " + std::to_string(v.dim()) + " at window " + std::to_string(i));
    if (std::abs(v.norm() - 1.0) > kUnitNormTolerance)
      fail(Errc::embedder, "embedder returned a non-unit vector at window " + std::to_string(i));
    seq.vectors[i] = std::move(v);
  };
  parallel_for(plan.size(), embedder.concurrent() ? jobs : 1u, run);
  return seq;
}

}  // namespace

EmbeddingSequence embed(const MelSpectrogram& mel, double rate, const Embedder& embedder, const VadMap& vad,
                        std::string file_id, unsigned jobs) {
  return embed_impl(&mel, mel.n_frames(), rate, embedder, vad, std::move(file_id), jobs);
}

EmbeddingSequence embed_frames(std::size_t n_frames, double rate, const Embedder& embedder, const VadMap& vad,
                               std::string file_id, unsigned jobs) {
  return embed_impl(nullptr, n_frames, rate, embedder, vad, std::move(file_id), jobs);
}

}  // namespace rdsv
