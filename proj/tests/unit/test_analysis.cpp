#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "rdsv/analysis.hpp"
#include "rdsv/error.hpp"
#include "rdsv/synthetic.hpp"

using namespace rdsv;

namespace {

Errc error_code(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return Errc::config;
}

DVector basis(std::size_t dim, std::size_t k) {
  std::vector<double> v(dim, 0.0);
  v[k] = 1.0;
  return DVector::normalized(v);
}

struct Fixture {
  CorpusConfig cfg;
  Corpus corpus;
  ReferenceAudioLibrary lib;
};

Fixture make_fixture(std::size_t n_referenced, double kappa, std::size_t dev_cases) {
  Fixture f;
  f.cfg.n_speakers = 6;
  f.cfg.n_referenced = n_referenced;
  f.cfg.dim = 32;
  f.cfg.case_duration_s = 120.0;
  f.cfg.kappa = kappa;
  f.cfg.min_pairwise_angle_deg = 60.0;
  f.cfg.splits = {{"ref", 3}, {"dev", dev_cases}};
  f.corpus = gen_corpus(f.cfg);
  RalConfig rc;
  rc.allowlist = std::set<std::string>(f.corpus.referenced.begin(), f.corpus.referenced.end());
  rc.min_ref_count = 1;
  f.lib = build_ral(f.corpus.splits[0].cases, rc);
  return f;
}

BinaryProblem random_problem(std::mt19937_64& gen, std::size_t n, std::size_t dim) {
  BinaryProblem p;
  p.n = n;
  p.dim = dim;
  std::normal_distribution<double> g;
  std::bernoulli_distribution coin(0.4);
  for (std::size_t i = 0; i < n * dim; ++i) p.x.push_back(g(gen));
  for (std::size_t i = 0; i < n; ++i) p.y.push_back(coin(gen) ? 1.0 : 0.0);
  return p;
}

// Central differences of the loss, an oracle for logistic_gradient.
LogisticModel numeric_gradient(const LogisticModel& m, const BinaryProblem& p, double lambda, double h = 1e-5) {
  LogisticModel g;
  g.weights.resize(m.weights.size());
  for (std::size_t k = 0; k < m.weights.size(); ++k) {
    auto plus = m, minus = m;
    plus.weights[k] += h;
    minus.weights[k] -= h;
    g.weights[k] = (logistic_loss(plus, p, lambda) - logistic_loss(minus, p, lambda)) / (2.0 * h);
  }
  auto plus = m, minus = m;
  plus.bias += h;
  minus.bias -= h;
  g.bias = (logistic_loss(plus, p, lambda) - logistic_loss(minus, p, lambda)) / (2.0 * h);
  return g;
}

bool close_relative(double a, double b, double rel) {
  return std::abs(a - b) <= rel * std::max({std::abs(a), std::abs(b), 1e-4});
}

}  // namespace

TEST_CASE("default grids") {
  CHECK(kDefaultScoreGrid == std::vector<double>{0.75, 0.8, 0.85, 0.9});
  CHECK(kDefaultSimGrid == std::vector<double>{0.05, 0.075, 0.1, 0.125});
  CHECK(kDefaultProbeRates == std::vector<double>{1, 3, 5, 7});
  CHECK(kDefaultProbeThresholds == std::vector<double>{0.85, 0.9, 0.95});
}

TEST_CASE("grid_search: 1x1 grid and strict cell worse than permissive") {
  const auto f = make_fixture(6, 50.0, 2);
  const auto& dev = f.corpus.splits[1].cases;
  const std::vector<double> one{0.85}, sim{0.1};
  const auto single = grid_search(dev, f.lib, one, sim, 0.5);
  REQUIRE(single.grid.size() == 1);
  CHECK(single.best.score_thresh == 0.85);
  CHECK(single.best.mean_der == single.grid[0].mean_der);

  // Every speaker is referenced. At score 0.999 under the literal rule every
  // confident judge window (margin > 0.1) is cast to UNK.
  const std::vector<double> scores{0.5, 0.999};
  const auto r = grid_search(dev, f.lib, scores, sim, 0.5);
  REQUIRE(r.grid.size() == 2);
  CHECK(r.grid[1].mean_der > r.grid[0].mean_der);
  CHECK(r.grid[1].mean_der > 0.5);
  CHECK(r.best.score_thresh == 0.5);
}

TEST_CASE("grid_search: invariants") {
  const auto f = make_fixture(4, 50.0, 3);
  auto dev = f.corpus.splits[1].cases;
  DiarizerConfig base;
  base.unknown_rule = UnknownRule::margin_below;
  const auto r = grid_search(dev, f.lib, kDefaultScoreGrid, kDefaultSimGrid, 0.5, base);
  REQUIRE(r.grid.size() == 16);
  double min_der = 1e9;
  for (const auto& c : r.grid) {
    min_der = std::min(min_der, c.mean_der);
    CHECK(c.mean_der >= 0.0);
  }
  CHECK(r.best.mean_der == min_der);
  // Score-major ordering.
  CHECK(r.grid[1].score_thresh == 0.75);
  CHECK(r.grid[1].sim_thresh == 0.075);
  CHECK(r.grid[4].score_thresh == 0.8);

  std::reverse(dev.begin(), dev.end());
  const auto rev = grid_search(dev, f.lib, kDefaultScoreGrid, kDefaultSimGrid, 0.5, base, 4);
  REQUIRE(rev.grid.size() == r.grid.size());
  for (std::size_t i = 0; i < r.grid.size(); ++i) CHECK(rev.grid[i].mean_der == r.grid[i].mean_der);
  CHECK(rev.best.score_thresh == r.best.score_thresh);
  CHECK(rev.best.sim_thresh == r.best.sim_thresh);

  // Enlarging the grid never makes the best cell worse.
  const std::vector<double> sub_score{0.8, 0.9}, sub_sim{0.1};
  const auto small = grid_search(dev, f.lib, sub_score, sub_sim, 0.5, base);
  CHECK(r.best.mean_der <= small.best.mean_der);

  CHECK(error_code([&] { grid_search(std::span<const ReferenceCase>{}, f.lib, sub_score, sub_sim, 0.5); }) ==
        Errc::config);
  CHECK(error_code([&] { grid_search(dev, f.lib, std::span<const double>{}, sub_sim, 0.5); }) == Errc::config);
}

TEST_CASE("grid_search ties go to the smaller thresholds") {
  // Zero-noise, all referenced: every cell scores 0.
  const auto f = make_fixture(6, kZeroNoise, 1);
  const std::vector<double> scores{0.9, 0.8}, sims{0.125, 0.05};
  const auto r = grid_search(f.corpus.splits[1].cases, f.lib, scores, sims, 0.5);
  for (const auto& c : r.grid) CHECK(c.mean_der == 0.0);
  CHECK(r.best.score_thresh == 0.8);
  CHECK(r.best.sim_thresh == 0.05);
}

TEST_CASE("logistic gradient matches finite differences") {
  std::mt19937_64 gen(31);
  const auto p = random_problem(gen, 40, 6);
  LogisticModel zero;
  zero.weights.assign(6, 0.0);
  const auto g0 = logistic_gradient(zero, p, 1e-4);
  // At zero the gradient is mean((0.5 - y) x) and mean(0.5 - y) for the bias.
  for (std::size_t k = 0; k < 6; ++k) {
    double expect = 0.0;
    for (std::size_t i = 0; i < p.n; ++i) expect += (0.5 - p.y[i]) * p.x[i * 6 + k];
    expect /= static_cast<double>(p.n);
    CHECK(g0.weights[k] == doctest::Approx(expect).epsilon(1e-12));
  }
  double bias = 0.0;
  for (double y : p.y) bias += 0.5 - y;
  CHECK(g0.bias == doctest::Approx(bias / static_cast<double>(p.n)).epsilon(1e-12));

  std::normal_distribution<double> g;
  for (int trial = 0; trial < 5; ++trial) {
    LogisticModel m;
    for (int k = 0; k < 6; ++k) m.weights.push_back(g(gen));
    m.bias = g(gen);
    const auto analytic = logistic_gradient(m, p, 1e-2);
    const auto numeric = numeric_gradient(m, p, 1e-2);
    for (std::size_t k = 0; k < 6; ++k) CHECK(close_relative(analytic.weights[k], numeric.weights[k], 1e-6));
    CHECK(close_relative(analytic.bias, numeric.bias, 1e-6));
  }
}

TEST_CASE("logistic loss is non-increasing during training") {
  std::mt19937_64 gen(37);
  const auto p = random_problem(gen, 60, 8);
  std::vector<double> trace;
  TrainOptions opts;
  opts.max_iterations = 500;
  fit_logistic(p, opts, &trace);
  REQUIRE(trace.size() > 10);
  for (std::size_t i = 1; i < trace.size(); ++i) CHECK(trace[i] <= trace[i - 1] + 1e-15);
  CHECK(trace.front() == doctest::Approx(std::log(2.0)));
}

TEST_CASE("one-vs-rest classifier: separable and conflicting data") {
  LabeledVectors train;
  for (int i = 0; i < 10; ++i) {
    train.add(basis(4, 0), "a");
    train.add(basis(4, 1), "b");
  }
  const auto clf = train_ovr_classifier(train);
  CHECK(clf.classes == std::vector<std::string>{"a", "b"});
  std::size_t correct = 0;
  for (std::size_t i = 0; i < train.size(); ++i)
    correct += clf.predict(train.vectors[i], 0.5, "reject") == train.labels[i];
  CHECK(correct == train.size());
  const auto probs = clf.probabilities(basis(4, 0));
  CHECK(probs[0] > 0.5);
  CHECK(probs[1] < 0.5);

  // Identical vectors with 3:1 conflicting labels: no classifier beats the
  // majority prior.
  LabeledVectors dup;
  for (int i = 0; i < 12; ++i) dup.add(basis(4, 2), i % 4 == 0 ? "b" : "a");
  dup.add(basis(4, 0), "c");
  const auto c2 = train_ovr_classifier(dup);
  std::size_t ok = 0;
  for (std::size_t i = 0; i < 12; ++i) ok += c2.predict(dup.vectors[i], 0.0, "reject") == dup.labels[i];
  CHECK(static_cast<double>(ok) / 12.0 <= 0.75 + 1e-12);

  LabeledVectors single;
  single.add(basis(4, 0), "a");
  CHECK(error_code([&] { train_ovr_classifier(single); }) == Errc::config);
}

TEST_CASE("training is deterministic across job counts") {
  std::mt19937_64 gen(41);
  std::normal_distribution<double> g;
  LabeledVectors train;
  for (int i = 0; i < 60; ++i) {
    std::vector<double> v(8);
    for (auto& x : v) x = std::abs(g(gen));
    v[static_cast<std::size_t>(i % 3)] += 2.0;
    train.add(DVector::normalized(v), "c" + std::to_string(i % 3));
  }
  const auto a = train_ovr_classifier(train, {}, 1);
  const auto b = train_ovr_classifier(train, {}, 3);
  for (std::size_t k = 0; k < a.models.size(); ++k) {
    CHECK(a.models[k].weights == b.models[k].weights);
    CHECK(a.models[k].bias == b.models[k].bias);
  }
}

TEST_CASE("label_windows pools or skips non-judges") {
  CorpusConfig cfg;
  cfg.n_speakers = 3;
  cfg.n_referenced = 2;
  cfg.dim = 8;
  cfg.case_duration_s = 60.0;
  const auto profiles = gen_profiles(cfg);
  const auto rc = gen_case(cfg, profiles, 0);
  const std::set<std::string> judges{"spk01", "spk02"};
  LabeledVectors all, only;
  label_windows(rc.embeddings, rc.annotation, judges, "non-judge", false, all);
  label_windows(rc.embeddings, rc.annotation, judges, "non-judge", true, only);
  CHECK(all.size() == rc.embeddings.size());
  const auto nonjudge = static_cast<std::size_t>(std::count(all.labels.begin(), all.labels.end(), "non-judge"));
  CHECK(only.size() == all.size() - nonjudge);
  for (const auto& l : only.labels) CHECK(judges.contains(l));
}

TEST_CASE("probe: zero noise is perfect; extreme threshold rejects everything") {
  CorpusConfig cfg;
  cfg.n_speakers = 5;
  cfg.n_referenced = 3;
  cfg.dim = 32;
  cfg.case_duration_s = 60.0;
  cfg.splits = {{"ref", 2}, {"dev", 2}};
  const std::set<std::string> judges{"spk01", "spk02", "spk03"};
  std::vector<ProbeSet> sets;
  for (double rate : {1.0, 3.0}) {
    cfg.rate = rate;
    const auto corpus = gen_corpus(cfg);
    ProbeSet s;
    s.rate = rate;
    for (const auto& rc : corpus.splits[0].cases)
      label_windows(rc.embeddings, rc.annotation, judges, "non-judge", true, s.train);
    for (const auto& rc : corpus.splits[1].cases)
      label_windows(rc.embeddings, rc.annotation, judges, "non-judge", false, s.dev);
    sets.push_back(std::move(s));
  }
  const auto r = probe(sets, kDefaultProbeThresholds);
  REQUIRE(r.cells.size() == 6);
  for (const auto& c : r.cells) {
    CHECK(c.accuracy == 1.0);
    CHECK(c.judge_recall == 1.0);
  }

  const std::vector<double> extreme{0.5, 0.9, 0.99, 0.9999999};
  const auto e = probe(std::span(sets).first(1), extreme);
  const auto& dev = sets[0].dev;
  const double prior = static_cast<double>(std::count(dev.labels.begin(), dev.labels.end(), "non-judge")) /
                       static_cast<double>(dev.size());
  CHECK(e.cells.back().accuracy == doctest::Approx(prior));
  CHECK(e.cells.back().judge_recall == 0.0);
  for (std::size_t i = 1; i < e.cells.size(); ++i) {
    CHECK(e.cells[i].judge_recall <= e.cells[i - 1].judge_recall);
    CHECK(e.cells[i].accuracy >= 0.0);
    CHECK(e.cells[i].accuracy <= 1.0);
  }

  const std::vector<double> bad{1.0};
  CHECK(error_code([&] { probe(sets, bad); }) == Errc::config);
}
