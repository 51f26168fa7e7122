#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "rdsv/embedding.hpp"

namespace rdsv {

inline constexpr double kZeroNoise = std::numeric_limits<double>::infinity();

struct SpeakerProfile {
  std::string name;
  DVector mean_direction;  // unit norm, non-negative components
  double concentration = kZeroNoise;  // kappa; infinity means no noise
};

// Speaker active at an original-time instant, if any.
using SpeakerAssignment = std::function<std::optional<std::string>(double)>;

// Stand-in for a pretrained voice encoder: each window returns its speaker's
// mean direction plus isotropic Gaussian noise with expected norm 1/sqrt(kappa),
// clamped to the non-negative orthant and renormalized. Noise is keyed on
// (seed, case_index, window index). Windows whose midpoint has no speaker use
// the silence profile (uniform direction unless given).
class SyntheticEmbedder final : public Embedder {
 public:
  SyntheticEmbedder(std::vector<SpeakerProfile> profiles, SpeakerAssignment assignment, std::uint64_t seed,
                    std::uint64_t case_index, std::optional<SpeakerProfile> silence = std::nullopt);

  std::size_t dim() const override { return dim_; }
  DVector embed_window(const WindowInput& window) const override;

  const SpeakerProfile& profile_for(double orig_time) const;

 private:
  std::vector<SpeakerProfile> profiles_;
  SpeakerAssignment assignment_;
  std::uint64_t seed_;
  std::uint64_t case_index_;
  SpeakerProfile silence_;
  std::size_t dim_;
};

// Deterministic embedder over real mel input: the per-bin mean and standard
// deviation of the window (80 features) are passed through a seeded Gaussian
// projection, rectified, offset and normalized. Speaker-discriminative only to
// the extent that these statistics are; intended for wiring real audio through
// the pipeline when no exported embeddings are available.
class ProjectionEmbedder final : public Embedder {
 public:
  explicit ProjectionEmbedder(std::size_t dim = kDefaultDim, std::uint64_t seed = 0);

  std::size_t dim() const override { return dim_; }
  DVector embed_window(const WindowInput& window) const override;

 private:
  std::size_t dim_;
  std::vector<double> weights_;  // [dim x 80]
};

}  // namespace rdsv
