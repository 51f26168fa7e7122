// Acceptance suite: one PASS/FAIL line per primary criterion, exit status 1
// if any criterion fails. Informational lines are prefixed with "INFO".

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "rdsv/analysis.hpp"
#include "rdsv/diarizer.hpp"
#include "rdsv/dvec_file.hpp"
#include "rdsv/embedders.hpp"
#include "rdsv/error.hpp"
#include "rdsv/fileio.hpp"
#include "rdsv/metrics.hpp"
#include "rdsv/ral.hpp"
#include "rdsv/rttm.hpp"
#include "rdsv/synthetic.hpp"
#include "support.hpp"

using namespace rdsv;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void report(const std::string& name, const std::function<Outcome()>& criterion) {
  Outcome o;
  try {
    o = criterion();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  if (!o.pass) ++failures;
  std::printf("%s  %-28s %s\n", o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.c_str());
  std::fflush(stdout);
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof(buf), f, args...);
  return buf;
}

// 9 referenced + 3 unreferenced speakers, dim 256, rate 5, >= 60 degrees.
CorpusConfig end_to_end_config(double kappa, std::uint64_t seed) {
  CorpusConfig c;
  c.n_speakers = 12;
  c.n_referenced = 9;
  c.dim = 256;
  c.rate = 5.0;
  c.case_duration_s = 300.0;
  c.kappa = kappa;
  c.seed = seed;
  c.min_pairwise_angle_deg = 60.0;
  c.splits = {{"ref", 6}, {"test", 5}};
  return c;
}

// R set builds the library, T set is diarized and scored against the
// roster-relabelled truth at collar 0.5.
AggregateReport run_end_to_end(const CorpusConfig& cfg, UnknownRule rule) {
  const auto corpus = gen_corpus(cfg);
  RalConfig rc;
  rc.allowlist = std::set<std::string>(corpus.referenced.begin(), corpus.referenced.end());
  const auto lib = build_ral(corpus.splits[0].cases, rc);
  DiarizerConfig dc;
  dc.score_thresh = 0.85;
  dc.sim_thresh = 0.1;
  dc.unknown_rule = rule;
  std::vector<DerReport> reports;
  for (const auto& tc : corpus.splits[1].cases) {
    const auto hyp = diarize(lib, tc.embeddings, dc);
    const auto ref = relabel_unreferenced(tc.annotation, lib.speakers(), dc.unk_label);
    reports.push_back(der(ref, hyp, 0.5));
  }
  return aggregate(reports);
}

bool unit(const DVector& v) { return std::abs(v.norm() - 1.0) <= 1e-6; }

}  // namespace

int main() {
  std::printf("rdsv acceptance suite\n");

  report("zero-noise end-to-end", [] {
    const auto t0 = std::chrono::steady_clock::now();
    const auto agg = run_end_to_end(end_to_end_config(kZeroNoise, 1), UnknownRule::margin_below);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return Outcome{agg.mean_der == 0.0 && secs < 10.0,
                   fmt("mean DER %.4f%% over %zu cases (margin_below), %.2f s", 100.0 * agg.mean_der, agg.case_count,
                       secs)};
  });
  {
    const auto lit = run_end_to_end(end_to_end_config(kZeroNoise, 1), UnknownRule::paper_literal);
    std::printf("INFO  zero-noise, paper_literal rule: mean DER %.2f%% (unreferenced speakers have near-zero margins)\n",
                100.0 * lit.mean_der);
  }

  report("noisy end-to-end (kappa 50)", [] {
    std::string detail;
    bool ok = true;
    for (std::uint64_t seed : {1, 2, 3}) {
      const auto agg = run_end_to_end(end_to_end_config(50.0, seed), UnknownRule::margin_below);
      ok = ok && agg.mean_der <= 0.05;
      detail += fmt("seed %llu: %.2f%%  ", static_cast<unsigned long long>(seed), 100.0 * agg.mean_der);
    }
    return Outcome{ok, detail + "(limit 5%, margin_below)"};
  });
  for (std::uint64_t seed : {1, 2, 3}) {
    const auto lit = run_end_to_end(end_to_end_config(50.0, seed), UnknownRule::paper_literal);
    std::printf("INFO  kappa 50 seed %llu, paper_literal rule: mean DER %.2f%%\n", static_cast<unsigned long long>(seed),
                100.0 * lit.mean_der);
  }

  report("DER oracle equivalence", [] {
    std::mt19937_64 gen(2024);
    double worst = 0.0;
    int cases = 0;
    while (cases < 50) {
      const auto ref = test::random_timeline(gen, "f", 20, 60.0, 4);
      const auto hyp = test::random_timeline(gen, "f", 20, 60.0, 4);
      for (double collar : {0.0, 0.5}) {
        const auto exact = der(ref, hyp, collar);
        const auto frames = frame_oracle_der(ref, hyp, collar, 0.005);
        worst = std::max(worst, std::abs(exact.der - frames.der));
      }
      ++cases;
    }
    return Outcome{worst <= 0.005, fmt("50 timelines x collars {0, 0.5}: max |exact - frame| = %.4f pp", 100.0 * worst)};
  });

  report("windowing arithmetic", [] {
    std::mt19937_64 gen(5);
    std::uniform_int_distribution<std::size_t> frames(0, 500);
    // Expected window widths: 100/rate rounded (no ties among these rates).
    const std::vector<std::pair<double, std::size_t>> rates{{0.625, 160}, {1, 100}, {3, 33}, {5, 20}, {7, 14}, {100, 1}};
    bool ok = true;
    int checked = 0;
    for (const auto& [rate, wf] : rates) {
      ok = ok && window_frames(rate) == wf;
      for (int k = 0; k < 200; ++k) {
        const std::size_t n = frames(gen);
        ok = ok && window_plan(n, rate).size() == n / wf;
        ++checked;
      }
    }
    auto rejected = [](double rate) {
      try {
        window_plan(100, rate);
      } catch (const Error& e) {
        return e.code() == Errc::range;
      }
      return false;
    };
    ok = ok && rejected(0.5) && rejected(101.0);
    return Outcome{ok, fmt("%d (rate, n_frames) pairs; 0.625 -> 160 frames; 0.5 and 101 rejected", checked)};
  });

  report("threshold rule table", [] {
    SpeakerScores s;
    s.speakers = {"A", "B"};
    s.n_steps = 3;
    s.scores = {0.90, 0.80, 0.84,   // A
                0.70, 0.60, 0.80};  // B
    DiarizerConfig lit, below;
    below.unknown_rule = UnknownRule::margin_below;
    const auto l = label_timesteps(s, lit);
    const auto b = label_timesteps(s, below);
    const bool ok = l == std::vector<std::string>{"A", "UNK", "A"} && b == std::vector<std::string>{"A", "A", "UNK"};
    return Outcome{ok, fmt("paper_literal [%s %s %s], margin_below [%s %s %s]", l[0].c_str(), l[1].c_str(), l[2].c_str(),
                           b[0].c_str(), b[1].c_str(), b[2].c_str())};
  });

  report("grid search determinism", [] {
    auto cfg = end_to_end_config(50.0, 7);
    cfg.splits = {{"ref", 6}, {"dev", 4}};
    const auto corpus = gen_corpus(cfg);
    RalConfig rc;
    rc.allowlist = std::set<std::string>(corpus.referenced.begin(), corpus.referenced.end());
    const auto lib = build_ral(corpus.splits[0].cases, rc);
    auto dev = corpus.splits[1].cases;
    const auto base = grid_search(dev, lib, kDefaultScoreGrid, kDefaultSimGrid, 0.5);
    bool ok = true;
    for (unsigned jobs : {1u, 2u, 4u, 8u}) {
      for (int run = 0; run < 2; ++run) {
        std::reverse(dev.begin(), dev.end());
        const auto r = grid_search(dev, lib, kDefaultScoreGrid, kDefaultSimGrid, 0.5, {}, jobs);
        ok = ok && r.best.score_thresh == base.best.score_thresh && r.best.sim_thresh == base.best.sim_thresh &&
             r.best.mean_der == base.best.mean_der;
        for (std::size_t i = 0; i < r.grid.size(); ++i) ok = ok && r.grid[i].mean_der == base.grid[i].mean_der;
      }
    }
    return Outcome{ok, fmt("best (%.3f, %.3f) mean DER %.2f%% identical over 8 runs, jobs {1,2,4,8}",
                           base.best.score_thresh, base.best.sim_thresh, 100.0 * base.best.mean_der)};
  });

  report("format round trips", [] {
    test::TempDir dir;
    auto cfg = end_to_end_config(50.0, 3);
    cfg.splits = {{"ref", 3}};
    const auto corpus = gen_corpus(cfg);
    bool ok = true;
    int files = 0;
    auto same = [&](const std::string& a, const std::string& b) {
      ++files;
      return read_file_bytes(a) == read_file_bytes(b);
    };
    for (const auto& rc : corpus.splits[0].cases) {
      write_dvec(rc.embeddings, dir.file("a.dvec"));
      write_dvec(read_dvec(dir.file("a.dvec")), dir.file("b.dvec"));
      ok = ok && same(dir.file("a.dvec"), dir.file("b.dvec"));
      write_rttm_file(rc.annotation, dir.file("a.rttm"));
      write_rttm_file(read_rttm_file(dir.file("a.rttm")).at(0), dir.file("b.rttm"));
      ok = ok && same(dir.file("a.rttm"), dir.file("b.rttm"));
    }
    RalConfig rc;
    rc.min_ref_count = 1;
    write_ral(build_ral(corpus.splits[0].cases, rc), dir.file("a.ral"));
    write_ral(read_ral(dir.file("a.ral")), dir.file("b.ral"));
    ok = ok && same(dir.file("a.ral"), dir.file("b.ral"));
    return Outcome{ok, fmt("%d DVEC1/RTTM/RAL1 write-read-write pairs byte-identical", files)};
  });

  report("probe sanity", [] {
    CorpusConfig cfg = end_to_end_config(kZeroNoise, 1);
    cfg.case_duration_s = 120.0;
    cfg.splits = {{"ref", 3}, {"dev", 2}};
    std::vector<ProbeSet> sets;
    for (double rate : kDefaultProbeRates) {
      cfg.rate = rate;
      const auto corpus = gen_corpus(cfg);
      const std::set<std::string> judges(corpus.referenced.begin(), corpus.referenced.end());
      ProbeSet s;
      s.rate = rate;
      for (const auto& rc : corpus.splits[0].cases)
        label_windows(rc.embeddings, rc.annotation, judges, "non-judge", true, s.train);
      for (const auto& rc : corpus.splits[1].cases)
        label_windows(rc.embeddings, rc.annotation, judges, "non-judge", false, s.dev);
      sets.push_back(std::move(s));
    }
    const auto r = probe(sets, kDefaultProbeThresholds);
    double min_acc = 1.0;
    for (const auto& c : r.cells) min_acc = std::min(min_acc, c.accuracy);

    // Analytic gradient against central differences on a random problem.
    std::mt19937_64 gen(99);
    std::normal_distribution<double> g;
    BinaryProblem p;
    p.n = 50;
    p.dim = 8;
    for (std::size_t i = 0; i < p.n * p.dim; ++i) p.x.push_back(g(gen));
    for (std::size_t i = 0; i < p.n; ++i) p.y.push_back(i % 3 == 0 ? 1.0 : 0.0);
    double worst = 0.0;
    for (int trial = 0; trial < 4; ++trial) {
      LogisticModel m;
      for (std::size_t k = 0; k < p.dim; ++k) m.weights.push_back(trial == 0 ? 0.0 : g(gen));
      m.bias = trial == 0 ? 0.0 : g(gen);
      const double lambda = 1e-4;
      const auto grad = logistic_gradient(m, p, lambda);
      auto fd = [&](std::size_t k) {
        const double h = 1e-5;
        auto a = m, b = m;
        if (k < p.dim) {
          a.weights[k] += h;
          b.weights[k] -= h;
        } else {
          a.bias += h;
          b.bias -= h;
        }
        return (logistic_loss(a, p, lambda) - logistic_loss(b, p, lambda)) / (2 * h);
      };
      for (std::size_t k = 0; k <= p.dim; ++k) {
        const double an = k < p.dim ? grad.weights[k] : grad.bias;
        const double num = fd(k);
        worst = std::max(worst, std::abs(an - num) / std::max({std::abs(an), std::abs(num), 1e-4}));
      }
    }
    return Outcome{min_acc == 1.0 && r.cells.size() == 12 && worst <= 1e-6,
                   fmt("min accuracy %.4f over %zu cells; gradient max rel. error %.2e", min_acc, r.cells.size(), worst)};
  });

  report("unit-norm invariant", [] {
    std::size_t checked = 0;
    bool ok = true;
    auto check = [&](const DVector& v) {
      ++checked;
      ok = ok && unit(v);
    };
    for (double kappa : {kZeroNoise, 50.0, 5.0, 0.5, 0.01}) {
      auto cfg = end_to_end_config(kappa, 11);
      cfg.case_duration_s = 120.0;
      cfg.splits = {{"ref", 3}};
      for (double rate : {0.625, 5.0, 100.0}) {
        cfg.rate = rate;
        const auto corpus = gen_corpus(cfg);
        for (const auto& p : corpus.profiles) check(p.mean_direction);
        for (const auto& rc : corpus.splits[0].cases)
          for (const auto& v : rc.embeddings.vectors) check(v);
        RalConfig rc;
        rc.min_ref_count = 1;
        for (const auto& [name, refs] : build_ral(corpus.splits[0].cases, rc).entries)
          for (const auto& v : refs) check(v);
      }
    }
    std::mt19937 gen(3);
    std::uniform_real_distribution<float> u(0.0f, 5.0f);
    std::vector<float> data(400 * kMelBins);
    for (auto& x : data) x = u(gen);
    const MelSpectrogram mel(400, data);
    for (std::uint64_t seed : {0, 1, 2}) {
      const ProjectionEmbedder proj(256, seed);
      for (const auto& v : embed(mel, 7.0, proj, VadMap::full_span(4.0), "p").vectors) check(v);
    }
    return Outcome{ok, fmt("%zu vectors from profiles, synthetic/projection embedders and RAL builds", checked)};
  });

  std::printf("%s: %d criterion(s) failed\n", failures == 0 ? "OK" : "FAILED", failures);
  return failures == 0 ? 0 : 1;
}
