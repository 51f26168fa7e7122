#include "rdsv/embedders.hpp"

#include <cmath>

#include "rdsv/error.hpp"
#include "rdsv/rng.hpp"

namespace rdsv {

namespace {

void check_profile(const SpeakerProfile& p, std::size_t dim) {
  if (p.mean_direction.dim() != dim) fail(Errc::dim_mismatch, "profile '" + p.name + "' has a different dimension");
  if (std::abs(p.mean_direction.norm() - 1.0) > kUnitNormTolerance)
    fail(Errc::config, "profile '" + p.name + "' mean direction is not unit norm");
  for (float v : p.mean_direction.values())
    if (v < 0.0f) fail(Errc::config, "profile '" + p.name + "' has negative components");
  if (!(p.concentration > 0.0)) fail(Errc::config, "profile '" + p.name + "' concentration must be positive");
}

SpeakerProfile uniform_silence(std::size_t dim) {
  std::vector<double> ones(dim, 1.0);
  return {"<silence>", DVector::normalized(ones), kZeroNoise};
}

}  // namespace

SyntheticEmbedder::SyntheticEmbedder(std::vector<SpeakerProfile> profiles, SpeakerAssignment assignment,
                                     std::uint64_t seed, std::uint64_t case_index,
                                     std::optional<SpeakerProfile> silence)
    : profiles_(std::move(profiles)), assignment_(std::move(assignment)), seed_(seed), case_index_(case_index) {
  if (profiles_.empty()) fail(Errc::config, "synthetic embedder needs at least one profile");
  dim_ = profiles_.front().mean_direction.dim();
  if (dim_ == 0) fail(Errc::config, "profile dimension must be positive");
  for (const auto& p : profiles_) check_profile(p, dim_);
  silence_ = silence ? std::move(*silence) : uniform_silence(dim_);
  check_profile(silence_, dim_);
}

const SpeakerProfile& SyntheticEmbedder::profile_for(double orig_time) const {
  if (assignment_) {
    if (auto name = assignment_(orig_time)) {
      for (const auto& p : profiles_)
        if (p.name == *name) return p;
    }
  }
  return silence_;
}

DVector SyntheticEmbedder::embed_window(const WindowInput& window) const {
  const SpeakerProfile& p = profile_for(window.orig_midpoint);
  if (std::isinf(p.concentration)) return p.mean_direction;

  const double sigma = 1.0 / std::sqrt(p.concentration * static_cast<double>(dim_));
  KeyedRng rng{seed_, static_cast<std::uint64_t>(Stream::noise), case_index_, window.index};
  std::vector<double> v(dim_);
  const auto mean = p.mean_direction.values();
  double sq = 0.0;
  for (std::size_t i = 0; i < dim_; ++i) {
    v[i] = std::max(0.0, static_cast<double>(mean[i]) + sigma * rng.gaussian());
    sq += v[i] * v[i];
  }
  if (!(sq > 0.0)) return p.mean_direction;
  return DVector::normalized(v);
}

namespace {
constexpr std::size_t kProjectionFeatures = 2 * kMelBins;
}

ProjectionEmbedder::ProjectionEmbedder(std::size_t dim, std::uint64_t seed) : dim_(dim) {
  if (dim_ == 0) fail(Errc::config, "embedding dimension must be positive");
  weights_.resize(dim_ * kProjectionFeatures);
  KeyedRng rng{seed, static_cast<std::uint64_t>(Stream::projection)};
  for (auto& w : weights_) w = rng.gaussian();
}

DVector ProjectionEmbedder::embed_window(const WindowInput& window) const {
  const std::size_t n = window.mel.size() / kMelBins;
  if (n == 0) fail(Errc::embedder, "projection embedder requires mel frames");
  std::vector<double> feat(kProjectionFeatures, 0.0);
  for (std::size_t f = 0; f < n; ++f)
    for (std::size_t b = 0; b < kMelBins; ++b) feat[b] += window.mel[f * kMelBins + b];
  for (std::size_t b = 0; b < kMelBins; ++b) feat[b] /= static_cast<double>(n);
  for (std::size_t f = 0; f < n; ++f)
    for (std::size_t b = 0; b < kMelBins; ++b) {
      const double d = window.mel[f * kMelBins + b] - feat[b];
      feat[kMelBins + b] += d * d;
    }
  for (std::size_t b = 0; b < kMelBins; ++b) feat[kMelBins + b] = std::sqrt(feat[kMelBins + b] / static_cast<double>(n));

  // The offset keeps silent windows (all-zero features) well defined.
  std::vector<double> out(dim_);
  for (std::size_t d = 0; d < dim_; ++d) {
    double acc = 0.0;
    for (std::size_t k = 0; k < kProjectionFeatures; ++k) acc += weights_[d * kProjectionFeatures + k] * feat[k];
    out[d] = std::max(0.0, acc) + 1e-3;
  }
  return DVector::normalized(out);
}

}  // namespace rdsv
