#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "rdsv/common.hpp"

namespace rdsv {

inline constexpr int kSampleRate = 16000;
inline constexpr std::size_t kMelBins = 40;

struct AudioBuffer {
  std::vector<float> samples;  // mono, [-1, 1]
  int sample_rate = kSampleRate;

  double duration() const { return static_cast<double>(samples.size()) / sample_rate; }
};

struct VadSegment {
  double orig_start = 0.0;
  double orig_end = 0.0;
  double concat_start = 0.0;

  double duration() const { return orig_end - orig_start; }
  bool operator==(const VadSegment&) const = default;
};

// Voiced regions in original-recording time plus their offsets in the
// concatenated speech stream.
struct VadMap {
  std::vector<VadSegment> segments;

  // Builds a map from (start, end) pairs, filling concat_start cumulatively.
  static VadMap from_regions(const std::vector<std::pair<double, double>>& regions);
  static VadMap full_span(double duration);

  double total_speech() const;
  bool empty() const { return segments.empty(); }
  bool operator==(const VadMap&) const = default;
};

struct VadConfig {
  int frame_ms = 30;
  double energy_ratio = 0.05;
  int smooth_frames = 7;
  int min_speech_ms = 90;
  int max_gap_ms = 300;
};

struct MelConfig {
  double window_ms = 25.0;
  double hop_ms = 10.0;
  std::size_t n_fft = 512;
  double fmin_hz = 0.0;
  double fmax_hz = 8000.0;
};

// Row-major [n_frames x 40] log(1 + magnitude) mel energies.
class MelSpectrogram {
 public:
  MelSpectrogram() = default;
  MelSpectrogram(std::size_t n_frames, std::vector<float> data);

  std::size_t n_frames() const { return n_frames_; }
  std::span<const float> frame(std::size_t i) const { return {data_.data() + i * kMelBins, kMelBins}; }
  // Frames [begin, end) as a contiguous row-major block.
  std::span<const float> frames(std::size_t begin, std::size_t end) const {
    return {data_.data() + begin * kMelBins, (end - begin) * kMelBins};
  }
  const std::vector<float>& data() const { return data_; }

 private:
  std::size_t n_frames_ = 0;
  std::vector<float> data_;
};

AudioBuffer load_wav(const std::string& path);
// 16-bit PCM mono writer, used by tests and tooling.
void write_wav(const AudioBuffer& buffer, const std::string& path);

VadMap detect_voice(const AudioBuffer& buffer, const VadConfig& cfg = {});
AudioBuffer concatenate_speech(const AudioBuffer& buffer, const VadMap& vad);

MelSpectrogram mel_spectrogram(const AudioBuffer& buffer, const MelConfig& cfg = {});

// HTK mel scale.
double hz_to_mel(double hz);
double mel_to_hz(double mel);
// Center frequencies (Hz) of the 40 triangular filters.
std::vector<double> mel_filter_centers(const MelConfig& cfg = {});

}  // namespace rdsv
