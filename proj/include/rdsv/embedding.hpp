#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "rdsv/audio.hpp"

namespace rdsv {

inline constexpr double kMinRate = 0.625;  // one window per 1600 ms
inline constexpr double kMaxRate = 100.0;  // one window per 10 ms mel frame
inline constexpr double kFramesPerSecond = 100.0;
inline constexpr std::size_t kDefaultDim = 256;
inline constexpr double kUnitNormTolerance = 1e-6;

// Unit-norm speech embedding.
class DVector {
 public:
  DVector() = default;
  // Takes components verbatim; use normalized() to build from raw values.
  explicit DVector(std::vector<float> components) : values_(std::move(components)) {}

  // L2-normalizes `raw`; throws Errc::norm for zero or non-finite input.
  static DVector normalized(std::span<const double> raw);
  static DVector normalized(std::span<const float> raw);

  std::size_t dim() const { return values_.size(); }
  double norm() const;
  std::span<const float> values() const { return values_; }
  float operator[](std::size_t i) const { return values_[i]; }
  bool operator==(const DVector&) const = default;

 private:
  std::vector<float> values_;
};

double dot(const DVector& a, const DVector& b);

struct FrameRange {
  std::size_t begin = 0;
  std::size_t end = 0;
  bool operator==(const FrameRange&) const = default;
};

// Throws Errc::range unless kMinRate <= rate <= kMaxRate.
void check_rate(double rate);
// round(100 / rate), ties to even.
std::size_t window_frames(double rate);
// Seconds of concatenated speech covered by one window.
double window_seconds(double rate);
std::vector<FrameRange> window_plan(std::size_t n_frames, double rate);

// True when `count` windows are consistent with `speech_seconds` of
// concatenated speech: the 25 ms analysis window may shave up to two frames
// off the nominal 100 frames/s.
bool window_count_consistent(std::size_t count, double rate, double speech_seconds);

struct EmbeddingSequence {
  std::string file_id;
  double rate = 5.0;
  std::size_t dim = kDefaultDim;
  int sample_rate = kSampleRate;
  std::vector<DVector> vectors;
  VadMap vad;

  std::size_t size() const { return vectors.size(); }
  bool empty() const { return vectors.empty(); }
  bool operator==(const EmbeddingSequence&) const = default;
};

struct WindowInput {
  std::size_t index = 0;
  FrameRange frames;
  std::span<const float> mel;  // row-major [frames x 40]; empty for mel-free embedders
  double concat_start = 0.0;
  double concat_end = 0.0;
  double orig_midpoint = 0.0;
};

// Maps one partial-utterance window to a d-vector. Implementations must be
// deterministic; embed() calls embed_window concurrently unless
// concurrent() returns false.
class Embedder {
 public:
  virtual ~Embedder() = default;
  virtual std::size_t dim() const = 0;
  virtual DVector embed_window(const WindowInput& window) const = 0;
  virtual bool concurrent() const { return true; }
};

EmbeddingSequence embed(const MelSpectrogram& mel, double rate, const Embedder& embedder, const VadMap& vad,
                        std::string file_id, unsigned jobs = 1);
// Same windowing over `n_frames` frames without mel data.
EmbeddingSequence embed_frames(std::size_t n_frames, double rate, const Embedder& embedder, const VadMap& vad,
                               std::string file_id, unsigned jobs = 1);

// Concatenated-speech time -> original time. Points on a VAD boundary map to
// the start of the later region.
double concat_to_original(const VadMap& vad, double concat_time);
// Splits the concatenated interval [begin, end) into its original-time pieces.
std::vector<std::pair<double, double>> map_concat_interval(const VadMap& vad, double begin, double end);
// Original-time span of window `index`; spans across a VAD gap include the gap.
std::pair<double, double> time_of(const EmbeddingSequence& seq, std::size_t index);

}  // namespace rdsv
