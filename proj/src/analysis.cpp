#include "rdsv/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "rdsv/error.hpp"
#include "rdsv/metrics.hpp"
#include "rdsv/parallel.hpp"

namespace rdsv {

TuneResult grid_search(std::span<const ReferenceCase> dev, const ReferenceAudioLibrary& lib,
                       std::span<const double> score_grid, std::span<const double> sim_grid, double collar,
                       const DiarizerConfig& base, unsigned jobs) {
  if (dev.empty()) fail(Errc::config, "grid search needs at least one dev case");
  if (score_grid.empty() || sim_grid.empty()) fail(Errc::config, "grid search needs non-empty grids");
  base.validate();

  std::vector<std::size_t> order(dev.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return dev[a].embeddings.file_id < dev[b].embeddings.file_id;
  });

  const auto roster = lib.speakers();
  const std::size_t n_cases = dev.size();
  std::vector<SpeakerScores> scores(n_cases);
  std::vector<Annotation> truth(n_cases);
  parallel_for(n_cases, jobs, [&](std::size_t k) {
    const auto& rc = dev[order[k]];
    truth[k] = relabel_unreferenced(rc.annotation, roster, base.unk_label);
    truth[k].file_id = rc.embeddings.file_id;
    if (!rc.embeddings.empty()) scores[k] = reduce_per_speaker(affinity(lib, rc.embeddings));
  });

  std::vector<DiarizerConfig> cells;
  for (double s : score_grid)
    for (double m : sim_grid) {
      DiarizerConfig cfg = base;
      cfg.score_thresh = s;
      cfg.sim_thresh = m;
      cfg.validate();
      cells.push_back(cfg);
    }

  std::vector<DerReport> reports(cells.size() * n_cases);
  parallel_for(reports.size(), jobs, [&](std::size_t idx) {
    const std::size_t c = idx / n_cases;
    const std::size_t k = idx % n_cases;
    const auto& seq = dev[order[k]].embeddings;
    Annotation hyp{seq.file_id, {}};
    if (!seq.empty()) hyp = assemble_hypothesis(label_timesteps(scores[k], cells[c]), seq, cells[c]);
    reports[idx] = der(truth[k], hyp, collar);
  });

  TuneResult result;
  for (std::size_t c = 0; c < cells.size(); ++c) {
    const auto agg = aggregate(std::span(reports).subspan(c * n_cases, n_cases));
    result.grid.push_back({cells[c].score_thresh, cells[c].sim_thresh, agg.mean_der, agg.std_der});
  }
  const TuneCell* best = &result.grid.front();
  for (const auto& cell : result.grid) {
    const bool better = cell.mean_der < best->mean_der ||
                        (cell.mean_der == best->mean_der &&
                         (cell.score_thresh < best->score_thresh ||
                          (cell.score_thresh == best->score_thresh && cell.sim_thresh < best->sim_thresh)));
    if (better) best = &cell;
  }
  result.best = *best;
  return result;
}

void label_windows(const EmbeddingSequence& seq, const Annotation& annotation, const std::set<std::string>& judges,
                   const std::string& nonjudge_label, bool judges_only, LabeledVectors& out) {
  const std::size_t width = window_frames(seq.rate);
  for (std::size_t i = 0; i < seq.vectors.size(); ++i) {
    const double mid = (static_cast<double>(i * width) + 0.5 * static_cast<double>(width)) / kFramesPerSecond;
    const auto speaker = annotation.speaker_at(concat_to_original(seq.vad, mid));
    if (!speaker) continue;
    if (judges.contains(*speaker)) {
      out.add(seq.vectors[i], *speaker);
    } else if (!judges_only) {
      out.add(seq.vectors[i], nonjudge_label);
    }
  }
}

namespace {

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double softplus(double z) { return std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z))); }

std::vector<double> margins(const LogisticModel& model, const BinaryProblem& p) {
  std::vector<double> z(p.n, model.bias);
  for (std::size_t i = 0; i < p.n; ++i) {
    const double* row = p.x.data() + i * p.dim;
    double acc = 0.0;
    for (std::size_t k = 0; k < p.dim; ++k) acc += row[k] * model.weights[k];
    z[i] += acc;
  }
  return z;
}

double loss_from_margins(const std::vector<double>& z, const LogisticModel& model, const BinaryProblem& p,
                         double lambda) {
  double acc = 0.0;
  for (std::size_t i = 0; i < p.n; ++i) acc += softplus(z[i]) - p.y[i] * z[i];
  double reg = 0.0;
  for (double w : model.weights) reg += w * w;
  return acc / static_cast<double>(p.n) + 0.5 * lambda * reg;
}

LogisticModel gradient_from_margins(const std::vector<double>& z, const LogisticModel& model, const BinaryProblem& p,
                                    double lambda) {
  LogisticModel g;
  g.weights.assign(p.dim, 0.0);
  const double inv_n = 1.0 / static_cast<double>(p.n);
  for (std::size_t i = 0; i < p.n; ++i) {
    const double r = (sigmoid(z[i]) - p.y[i]) * inv_n;
    const double* row = p.x.data() + i * p.dim;
    for (std::size_t k = 0; k < p.dim; ++k) g.weights[k] += r * row[k];
    g.bias += r;
  }
  for (std::size_t k = 0; k < p.dim; ++k) g.weights[k] += lambda * model.weights[k];
  return g;
}

void check_problem(const LogisticModel& model, const BinaryProblem& p) {
  if (p.n == 0) fail(Errc::config, "logistic regression needs at least one sample");
  if (p.x.size() != p.n * p.dim || p.y.size() != p.n) fail(Errc::dim_mismatch, "malformed design matrix");
  if (model.weights.size() != p.dim) fail(Errc::dim_mismatch, "model dimension differs from data dimension");
}

}  // namespace

double logistic_loss(const LogisticModel& model, const BinaryProblem& problem, double lambda) {
  check_problem(model, problem);
  return loss_from_margins(margins(model, problem), model, problem, lambda);
}

LogisticModel logistic_gradient(const LogisticModel& model, const BinaryProblem& problem, double lambda) {
  check_problem(model, problem);
  return gradient_from_margins(margins(model, problem), model, problem, lambda);
}

LogisticModel fit_logistic(const BinaryProblem& problem, const TrainOptions& opts, std::vector<double>* loss_trace) {
  LogisticModel model;
  model.weights.assign(problem.dim, 0.0);
  check_problem(model, problem);
  for (std::size_t it = 0; it < opts.max_iterations; ++it) {
    const auto z = margins(model, problem);
    if (loss_trace != nullptr) loss_trace->push_back(loss_from_margins(z, model, problem, opts.lambda));
    const auto g = gradient_from_margins(z, model, problem, opts.lambda);
    double inf_norm = std::abs(g.bias);
    for (double v : g.weights) inf_norm = std::max(inf_norm, std::abs(v));
    if (inf_norm < opts.tolerance) break;
    for (std::size_t k = 0; k < problem.dim; ++k) model.weights[k] -= opts.step * g.weights[k];
    model.bias -= opts.step * g.bias;
  }
  return model;
}

std::vector<double> OvrClassifier::probabilities(const DVector& v) const {
  if (v.dim() != dim) fail(Errc::dim_mismatch, "vector dimension differs from classifier dimension");
  std::vector<double> out(models.size());
  const auto x = v.values();
  for (std::size_t c = 0; c < models.size(); ++c) {
    double z = models[c].bias;
    for (std::size_t k = 0; k < dim; ++k) z += models[c].weights[k] * x[k];
    out[c] = sigmoid(z);
  }
  return out;
}

std::string OvrClassifier::predict(const DVector& v, double threshold, const std::string& reject_label) const {
  const auto p = probabilities(v);
  const auto best = static_cast<std::size_t>(std::max_element(p.begin(), p.end()) - p.begin());
  return p[best] > threshold ? classes[best] : reject_label;
}

OvrClassifier train_ovr_classifier(const LabeledVectors& train, const TrainOptions& opts, unsigned jobs) {
  if (train.vectors.size() != train.labels.size()) fail(Errc::config, "vector and label counts differ");
  if (train.vectors.empty()) fail(Errc::config, "classifier needs training vectors");
  OvrClassifier clf;
  clf.classes.assign(train.labels.begin(), train.labels.end());
  std::sort(clf.classes.begin(), clf.classes.end());
  clf.classes.erase(std::unique(clf.classes.begin(), clf.classes.end()), clf.classes.end());
  if (clf.classes.size() < 2) fail(Errc::config, "one-vs-rest classifier needs at least two classes");
  clf.dim = train.vectors.front().dim();

  BinaryProblem base;
  base.n = train.vectors.size();
  base.dim = clf.dim;
  base.x.reserve(base.n * base.dim);
  for (const auto& v : train.vectors) {
    if (v.dim() != clf.dim) fail(Errc::dim_mismatch, "training vectors differ in dimension");
    base.x.insert(base.x.end(), v.values().begin(), v.values().end());
  }

  clf.models.resize(clf.classes.size());
  parallel_for(clf.classes.size(), jobs, [&](std::size_t c) {
    BinaryProblem p;
    p.n = base.n;
    p.dim = base.dim;
    p.x = base.x;
    p.y.resize(p.n);
    for (std::size_t i = 0; i < p.n; ++i) p.y[i] = train.labels[i] == clf.classes[c] ? 1.0 : 0.0;
    clf.models[c] = fit_logistic(p, opts);
  });
  return clf;
}

ProbeResult probe(std::span<const ProbeSet> sets, std::span<const double> thresholds,
                  const std::string& nonjudge_label, const TrainOptions& opts, unsigned jobs) {
  for (double t : thresholds)
    if (!(t > 0.0 && t < 1.0)) fail(Errc::config, "probability thresholds must lie in (0, 1)");
  ProbeResult result;
  for (const auto& set : sets) {
    check_rate(set.rate);
    if (set.dev.vectors.empty()) fail(Errc::config, "probe dev set is empty");
    const auto clf = train_ovr_classifier(set.train, opts, jobs);

    std::vector<std::vector<double>> probs(set.dev.size());
    parallel_for(set.dev.size(), jobs, [&](std::size_t i) { probs[i] = clf.probabilities(set.dev.vectors[i]); });

    for (double t : thresholds) {
      std::size_t correct = 0, judges = 0, judges_correct = 0;
      for (std::size_t i = 0; i < set.dev.size(); ++i) {
        const auto& p = probs[i];
        const auto best = static_cast<std::size_t>(std::max_element(p.begin(), p.end()) - p.begin());
        const std::string& predicted = p[best] > t ? clf.classes[best] : nonjudge_label;
        const std::string& truth = set.dev.labels[i];
        const bool ok = predicted == truth;
        correct += ok;
        if (truth != nonjudge_label) {
          ++judges;
          judges_correct += ok;
        }
      }
      ProbeCell cell;
      cell.rate = set.rate;
      cell.threshold = t;
      cell.n_dev = set.dev.size();
      cell.accuracy = static_cast<double>(correct) / static_cast<double>(set.dev.size());
      cell.judge_recall = judges > 0 ? static_cast<double>(judges_correct) / static_cast<double>(judges) : 0.0;
      result.cells.push_back(cell);
    }
  }
  return result;
}

}  // namespace rdsv
