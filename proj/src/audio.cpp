#include "rdsv/audio.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstring>
#include <numbers>

#include "rdsv/error.hpp"
#include "rdsv/fileio.hpp"

namespace rdsv {

namespace {

std::uint32_t le32(const std::uint8_t* p) {
  return std::uint32_t(p[0]) | std::uint32_t(p[1]) << 8 | std::uint32_t(p[2]) << 16 | std::uint32_t(p[3]) << 24;
}
std::uint16_t le16(const std::uint8_t* p) { return static_cast<std::uint16_t>(p[0] | p[1] << 8); }

void put32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}
void put16(std::vector<std::uint8_t>& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
}

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

// In-place iterative radix-2 FFT; size must be a power of two.
void fft(std::vector<std::complex<double>>& x) {
  const std::size_t n = x.size();
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(x[i], x[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double angle = -2.0 * std::numbers::pi / static_cast<double>(len);
    const std::complex<double> step(std::cos(angle), std::sin(angle));
    for (std::size_t i = 0; i < n; i += len) {
      std::complex<double> w(1.0, 0.0);
      for (std::size_t k = 0; k < len / 2; ++k) {
        const auto u = x[i + k];
        const auto v = x[i + k + len / 2] * w;
        x[i + k] = u + v;
        x[i + k + len / 2] = u - v;
        w *= step;
      }
    }
  }
}

std::vector<double> mel_points(const MelConfig& cfg) {
  const double lo = hz_to_mel(cfg.fmin_hz);
  const double hi = hz_to_mel(cfg.fmax_hz);
  std::vector<double> pts(kMelBins + 2);
  for (std::size_t i = 0; i < pts.size(); ++i)
    pts[i] = mel_to_hz(lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(kMelBins + 1));
  return pts;
}

}  // namespace

double hz_to_mel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }
double mel_to_hz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

std::vector<double> mel_filter_centers(const MelConfig& cfg) {
  auto pts = mel_points(cfg);
  return {pts.begin() + 1, pts.end() - 1};
}

MelSpectrogram::MelSpectrogram(std::size_t n_frames, std::vector<float> data)
    : n_frames_(n_frames), data_(std::move(data)) {
  if (data_.size() != n_frames_ * kMelBins) fail(Errc::dim_mismatch, "mel data size does not match frame count");
}

VadMap VadMap::from_regions(const std::vector<std::pair<double, double>>& regions) {
  VadMap map;
  double concat = 0.0;
  for (const auto& [start, end] : regions) {
    if (!(end > start)) fail(Errc::bounds, "VAD region must have positive length");
    if (!map.segments.empty() && start < map.segments.back().orig_end)
      fail(Errc::bounds, "VAD regions must be sorted and non-overlapping");
    map.segments.push_back({start, end, concat});
    concat += end - start;
  }
  return map;
}

VadMap VadMap::full_span(double duration) {
  if (duration <= 0.0) return {};
  return from_regions({{0.0, duration}});
}

double VadMap::total_speech() const {
  double total = 0.0;
  for (const auto& s : segments) total += s.duration();
  return total;
}

AudioBuffer load_wav(const std::string& path) {
  const auto bytes = read_file_bytes(path);
  if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 || std::memcmp(bytes.data() + 8, "WAVE", 4) != 0)
    fail(Errc::format, path + ": not a RIFF/WAVE file");

  std::uint16_t format = 0, channels = 0, bits = 0;
  std::uint32_t rate = 0;
  const std::uint8_t* data = nullptr;
  std::size_t data_size = 0;
  bool have_fmt = false;

  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const std::uint8_t* chunk = bytes.data() + pos;
    const std::uint32_t size = le32(chunk + 4);
    const std::size_t body = pos + 8;
    const std::size_t avail = std::min<std::size_t>(size, bytes.size() - body);
    if (std::memcmp(chunk, "fmt ", 4) == 0) {
      if (avail < 16) fail(Errc::format, path + ": truncated fmt chunk");
      format = le16(chunk + 8);
      channels = le16(chunk + 10);
      rate = le32(chunk + 12);
      bits = le16(chunk + 22);
      if (format == kFormatExtensible) {
        if (avail < 26) fail(Errc::format, path + ": truncated extensible fmt chunk");
        format = le16(chunk + 32);
      }
      have_fmt = true;
    } else if (std::memcmp(chunk, "data", 4) == 0) {
      data = chunk + 8;
      data_size = avail;
    }
    pos = body + size + (size & 1u);
  }
  if (!have_fmt || data == nullptr) fail(Errc::format, path + ": missing fmt or data chunk");
  const bool pcm16 = format == kFormatPcm && bits == 16;
  const bool float32 = format == kFormatFloat && bits == 32;
  if (!pcm16 && !float32)
    fail(Errc::format, path + ": unsupported codec (format " + std::to_string(format) + ", " + std::to_string(bits) +
                           " bits); expected 16-bit PCM or 32-bit float");
  if (channels == 0) fail(Errc::format, path + ": zero channels");
  if (rate != kSampleRate)
    fail(Errc::rate, path + ": sample rate " + std::to_string(rate) + " Hz, expected 16000 Hz");

  const std::size_t width = bits / 8;
  const std::size_t n = data_size / (width * channels);
  AudioBuffer out;
  out.samples.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    double acc = 0.0;
    for (std::size_t c = 0; c < channels; ++c) {
      const std::uint8_t* p = data + (i * channels + c) * width;
      if (pcm16) {
        acc += static_cast<std::int16_t>(le16(p)) / 32768.0;
      } else {
        acc += std::bit_cast<float>(le32(p));
      }
    }
    const double v = acc / channels;
    if (!std::isfinite(v)) fail(Errc::format, path + ": non-finite sample");
    out.samples[i] = static_cast<float>(std::clamp(v, -1.0, 1.0));
  }
  return out;
}

void write_wav(const AudioBuffer& buffer, const std::string& path) {
  const auto n = static_cast<std::uint32_t>(buffer.samples.size());
  std::vector<std::uint8_t> out;
  out.reserve(44 + 2 * n);
  out.insert(out.end(), {'R', 'I', 'F', 'F'});
  put32(out, 36 + 2 * n);
  out.insert(out.end(), {'W', 'A', 'V', 'E', 'f', 'm', 't', ' '});
  put32(out, 16);
  put16(out, kFormatPcm);
  put16(out, 1);
  put32(out, static_cast<std::uint32_t>(buffer.sample_rate));
  put32(out, static_cast<std::uint32_t>(buffer.sample_rate) * 2);
  put16(out, 2);
  put16(out, 16);
  out.insert(out.end(), {'d', 'a', 't', 'a'});
  put32(out, 2 * n);
  for (float s : buffer.samples) {
    const auto q = static_cast<std::int16_t>(std::lround(std::clamp(static_cast<double>(s), -1.0, 32767.0 / 32768.0) * 32768.0));
    put16(out, static_cast<std::uint16_t>(q));
  }
  write_file_atomic(path, out);
}

VadMap detect_voice(const AudioBuffer& buffer, const VadConfig& cfg) {
  if (cfg.frame_ms != 10 && cfg.frame_ms != 20 && cfg.frame_ms != 30)
    fail(Errc::config, "VAD frame_ms must be 10, 20 or 30");
  if (!(cfg.energy_ratio > 0.0 && cfg.energy_ratio < 1.0)) fail(Errc::config, "VAD energy_ratio must lie in (0, 1)");
  if (cfg.smooth_frames < 1) fail(Errc::config, "VAD smooth_frames must be >= 1");
  if (cfg.min_speech_ms < 0 || cfg.max_gap_ms < 0) fail(Errc::config, "VAD durations must be non-negative");

  const auto& x = buffer.samples;
  if (x.empty()) return {};
  const std::size_t frame_len = static_cast<std::size_t>(buffer.sample_rate / 1000 * cfg.frame_ms);
  const std::size_t n_frames = (x.size() + frame_len - 1) / frame_len;

  std::vector<double> rms(n_frames);
  for (std::size_t f = 0; f < n_frames; ++f) {
    const std::size_t b = f * frame_len;
    const std::size_t e = std::min(b + frame_len, x.size());
    double acc = 0.0;
    for (std::size_t i = b; i < e; ++i) acc += static_cast<double>(x[i]) * x[i];
    rms[f] = std::sqrt(acc / static_cast<double>(e - b));
  }

  auto sorted = rms;
  std::sort(sorted.begin(), sorted.end());
  const auto rank = static_cast<std::size_t>(std::ceil(0.95 * static_cast<double>(n_frames)));
  const double p95 = sorted[std::max<std::size_t>(rank, 1) - 1];
  const double threshold = cfg.energy_ratio * p95;

  std::vector<int> raw(n_frames);
  for (std::size_t f = 0; f < n_frames; ++f) raw[f] = rms[f] > threshold ? 1 : 0;

  // Centered moving average, truncated at the buffer edges.
  const auto width = static_cast<std::ptrdiff_t>(cfg.smooth_frames);
  const std::ptrdiff_t half = width / 2;
  std::vector<bool> mask(n_frames);
  for (std::ptrdiff_t f = 0; f < static_cast<std::ptrdiff_t>(n_frames); ++f) {
    const std::ptrdiff_t lo = std::max<std::ptrdiff_t>(0, f - half);
    const std::ptrdiff_t hi = std::min<std::ptrdiff_t>(static_cast<std::ptrdiff_t>(n_frames), f - half + width);
    int sum = 0;
    for (std::ptrdiff_t k = lo; k < hi; ++k) sum += raw[static_cast<std::size_t>(k)];
    mask[static_cast<std::size_t>(f)] = 2 * sum >= (hi - lo);
  }

  const double sr = buffer.sample_rate;
  auto frame_time = [&](std::size_t f) { return static_cast<double>(std::min(f * frame_len, x.size())) / sr; };

  std::vector<std::pair<double, double>> runs;
  for (std::size_t f = 0; f < n_frames;) {
    if (!mask[f]) {
      ++f;
      continue;
    }
    std::size_t g = f;
    while (g < n_frames && mask[g]) ++g;
    runs.emplace_back(frame_time(f), frame_time(g));
    f = g;
  }

  const double min_speech = cfg.min_speech_ms / 1000.0;
  const double max_gap = cfg.max_gap_ms / 1000.0;
  std::erase_if(runs, [&](const auto& r) { return r.second - r.first < min_speech - kTimeEps; });

  std::vector<std::pair<double, double>> merged;
  for (const auto& r : runs) {
    if (!merged.empty() && r.first - merged.back().second < max_gap - kTimeEps) {
      merged.back().second = r.second;
    } else {
      merged.push_back(r);
    }
  }
  return VadMap::from_regions(merged);
}

AudioBuffer concatenate_speech(const AudioBuffer& buffer, const VadMap& vad) {
  AudioBuffer out;
  out.sample_rate = buffer.sample_rate;
  const double sr = buffer.sample_rate;
  for (const auto& seg : vad.segments) {
    const long long b = std::llround(seg.orig_start * sr);
    const long long e = std::llround(seg.orig_end * sr);
    if (b < 0 || e < b || static_cast<std::size_t>(e) > buffer.samples.size())
      fail(Errc::bounds, "VAD segment [" + std::to_string(seg.orig_start) + ", " + std::to_string(seg.orig_end) +
                             ") outside buffer of " + std::to_string(buffer.duration()) + " s");
    out.samples.insert(out.samples.end(), buffer.samples.begin() + b, buffer.samples.begin() + e);
  }
  return out;
}

MelSpectrogram mel_spectrogram(const AudioBuffer& buffer, const MelConfig& cfg) {
  const double sr = buffer.sample_rate;
  const auto win = static_cast<std::size_t>(std::lround(cfg.window_ms * sr / 1000.0));
  const auto hop = static_cast<std::size_t>(std::lround(cfg.hop_ms * sr / 1000.0));
  if (win == 0 || hop == 0) fail(Errc::config, "mel window and hop must be positive");
  if (buffer.samples.size() < win)
    fail(Errc::length, "buffer of " + std::to_string(buffer.samples.size()) + " samples is shorter than one " +
                           std::to_string(win) + "-sample analysis window");
  const std::size_t n_fft = std::bit_ceil(std::max(cfg.n_fft, win));
  const std::size_t n_bins = n_fft / 2 + 1;
  const std::size_t n_frames = 1 + (buffer.samples.size() - win) / hop;

  std::vector<double> window(win);
  for (std::size_t i = 0; i < win; ++i)
    window[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(win));

  // Triangular filters sampled at FFT bin frequencies; each keeps [first, last) non-zero bins.
  const auto pts = mel_points(cfg);
  struct Filter {
    std::size_t first = 0;
    std::vector<double> weights;
  };
  std::vector<Filter> filters(kMelBins);
  for (std::size_t m = 0; m < kMelBins; ++m) {
    const double left = pts[m], center = pts[m + 1], right = pts[m + 2];
    std::vector<double> w(n_bins, 0.0);
    for (std::size_t k = 0; k < n_bins; ++k) {
      const double f = static_cast<double>(k) * sr / static_cast<double>(n_fft);
      if (f > left && f <= center) {
        w[k] = (f - left) / (center - left);
      } else if (f > center && f < right) {
        w[k] = (right - f) / (right - center);
      }
    }
    std::size_t first = 0;
    while (first < n_bins && w[first] == 0.0) ++first;
    std::size_t last = n_bins;
    while (last > first && w[last - 1] == 0.0) --last;
    filters[m].first = first;
    filters[m].weights.assign(w.begin() + static_cast<std::ptrdiff_t>(first), w.begin() + static_cast<std::ptrdiff_t>(last));
  }

  std::vector<float> data(n_frames * kMelBins);
  std::vector<std::complex<double>> spec(n_fft);
  std::vector<double> mag(n_bins);
  for (std::size_t f = 0; f < n_frames; ++f) {
    const float* src = buffer.samples.data() + f * hop;
    for (std::size_t i = 0; i < n_fft; ++i) spec[i] = i < win ? std::complex<double>(src[i] * window[i], 0.0) : 0.0;
    fft(spec);
    for (std::size_t k = 0; k < n_bins; ++k) mag[k] = std::abs(spec[k]);
    for (std::size_t m = 0; m < kMelBins; ++m) {
      double acc = 0.0;
      const auto& flt = filters[m];
      for (std::size_t k = 0; k < flt.weights.size(); ++k) acc += flt.weights[k] * mag[flt.first + k];
      data[f * kMelBins + m] = static_cast<float>(std::log1p(acc));
    }
  }
  return MelSpectrogram(n_frames, std::move(data));
}

}  // namespace rdsv
