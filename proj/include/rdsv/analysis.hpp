#pragma once

#include <set>
#include <span>
#include <string>
#include <vector>

#include "rdsv/diarizer.hpp"
#include "rdsv/embedding.hpp"
#include "rdsv/ral.hpp"

namespace rdsv {

// ---- threshold tuning ----

inline const std::vector<double> kDefaultScoreGrid{0.75, 0.8, 0.85, 0.9};
inline const std::vector<double> kDefaultSimGrid{0.05, 0.075, 0.1, 0.125};

struct TuneCell {
  double score_thresh = 0.0;
  double sim_thresh = 0.0;
  double mean_der = 0.0;
  double std_der = 0.0;
};

struct TuneResult {
  std::vector<TuneCell> grid;  // score-major, in the order the grids were given
  TuneCell best;               // argmin mean_der; ties -> smaller score, then smaller sim
};

// Diarizes every dev case for every (score, sim) cell, relabels the ground
// truth against the library roster and aggregates DER at `collar`. `base`
// supplies the unknown rule, label and smoothing. Result does not depend on
// dev-case order or `jobs`.
TuneResult grid_search(std::span<const ReferenceCase> dev, const ReferenceAudioLibrary& lib,
                       std::span<const double> score_grid, std::span<const double> sim_grid, double collar,
                       const DiarizerConfig& base = {}, unsigned jobs = 1);

// ---- separability probe ----

struct LabeledVectors {
  std::vector<DVector> vectors;
  std::vector<std::string> labels;

  void add(DVector v, std::string label) {
    vectors.push_back(std::move(v));
    labels.push_back(std::move(label));
  }
  std::size_t size() const { return vectors.size(); }
};

// Labels each window by the annotated speaker at its midpoint. Windows with no
// speaker are skipped. Speakers outside `judges` get `nonjudge_label`, or are
// skipped when `judges_only` is set.
void label_windows(const EmbeddingSequence& seq, const Annotation& annotation, const std::set<std::string>& judges,
                   const std::string& nonjudge_label, bool judges_only, LabeledVectors& out);

struct TrainOptions {
  double lambda = 1e-4;
  double step = 0.5;
  double tolerance = 1e-6;  // gradient infinity-norm
  std::size_t max_iterations = 5000;
};

struct LogisticModel {
  std::vector<double> weights;
  double bias = 0.0;
};

// Dense design matrix for a binary problem; targets are 0/1.
struct BinaryProblem {
  std::size_t n = 0;
  std::size_t dim = 0;
  std::vector<double> x;  // row-major [n x dim]
  std::vector<double> y;
};

// Mean log-loss plus (lambda/2)|w|^2; the bias is not regularized.
double logistic_loss(const LogisticModel& model, const BinaryProblem& problem, double lambda);
LogisticModel logistic_gradient(const LogisticModel& model, const BinaryProblem& problem, double lambda);
// Full-batch gradient descent from zero. Appends the loss before every step to
// `loss_trace` when given.
LogisticModel fit_logistic(const BinaryProblem& problem, const TrainOptions& opts,
                           std::vector<double>* loss_trace = nullptr);

struct OvrClassifier {
  std::vector<std::string> classes;  // sorted
  std::vector<LogisticModel> models;
  std::size_t dim = 0;

  // Per-class one-vs-rest probabilities sigma(w_k . x + b_k), not renormalized.
  std::vector<double> probabilities(const DVector& v) const;
  // Most probable class if its probability exceeds `threshold`, else `reject_label`.
  std::string predict(const DVector& v, double threshold, const std::string& reject_label) const;
};

OvrClassifier train_ovr_classifier(const LabeledVectors& train, const TrainOptions& opts = {}, unsigned jobs = 1);

inline const std::vector<double> kDefaultProbeRates{1, 3, 5, 7};
inline const std::vector<double> kDefaultProbeThresholds{0.85, 0.9, 0.95};

struct ProbeSet {
  double rate = 5.0;
  LabeledVectors train;  // judge vectors only
  LabeledVectors dev;    // every labeled window; non-judges carry the non-judge label
};

struct ProbeCell {
  double rate = 0.0;
  double threshold = 0.0;
  double accuracy = 0.0;
  double judge_recall = 0.0;  // correctly named judge windows / judge windows
  std::size_t n_dev = 0;
};

struct ProbeResult {
  std::vector<ProbeCell> cells;  // rate-major
};

ProbeResult probe(std::span<const ProbeSet> sets, std::span<const double> thresholds,
                  const std::string& nonjudge_label = "non-judge", const TrainOptions& opts = {}, unsigned jobs = 1);

}  // namespace rdsv
