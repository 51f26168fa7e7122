#include "rdsv/synthetic.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <numbers>

#include <json.hpp>

#include "rdsv/dvec_file.hpp"
#include "rdsv/error.hpp"
#include "rdsv/fileio.hpp"
#include "rdsv/parallel.hpp"
#include "rdsv/rng.hpp"

namespace rdsv {

using nlohmann::json;

void CorpusConfig::validate() const {
  if (n_speakers < 2) fail(Errc::config, "corpus needs at least two speakers");
  if (n_referenced == 0 || n_referenced > n_speakers) fail(Errc::config, "n_referenced must lie in [1, n_speakers]");
  if (dim == 0) fail(Errc::config, "dim must be positive");
  check_rate(rate);
  if (!(case_duration_s > 0.0)) fail(Errc::config, "case_duration_s must be positive");
  if (!(turn_min_s > 0.0) || turn_min_s > turn_max_s) fail(Errc::config, "turn lengths must satisfy 0 < min <= max");
  if (!(kappa > 0.0)) fail(Errc::config, "kappa must be positive (use inf for zero noise)");
  if (!(min_pairwise_angle_deg >= 0.0)) fail(Errc::config, "min_pairwise_angle_deg must be non-negative");
}

std::vector<SpeakerProfile> gen_profiles(const CorpusConfig& cfg) {
  cfg.validate();
  const std::size_t n = cfg.n_speakers;
  const std::size_t dim = cfg.dim;
  auto name = [](std::size_t i) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "spk%02zu", i + 1);
    return std::string(buf);
  };

  std::vector<SpeakerProfile> out;
  // Non-negative vectors are never more than 90 degrees apart; at exactly 90
  // only disjoint supports qualify, so the standard basis is used.
  if (cfg.min_pairwise_angle_deg > 90.0 + 1e-9)
    fail(Errc::infeasible, "pairwise angles above 90 degrees are impossible in the non-negative orthant");
  if (cfg.min_pairwise_angle_deg >= 90.0 - 1e-9) {
    if (n > dim) fail(Errc::infeasible, "cannot place more orthogonal profiles than dimensions");
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<double> e(dim, 0.0);
      e[i] = 1.0;
      out.push_back({name(i), DVector::normalized(e), cfg.kappa});
    }
    return out;
  }

  const double max_cos = std::cos(cfg.min_pairwise_angle_deg * std::numbers::pi / 180.0);
  for (std::size_t i = 0; i < n; ++i) {
    bool placed = false;
    for (std::size_t attempt = 0; attempt < cfg.max_retries && !placed; ++attempt) {
      KeyedRng rng{cfg.seed, static_cast<std::uint64_t>(Stream::profiles), i, attempt};
      std::vector<double> v(dim);
      double sq = 0.0;
      for (auto& x : v) {
        x = std::max(0.0, rng.gaussian());
        sq += x * x;
      }
      if (!(sq > 0.0)) continue;
      DVector cand = DVector::normalized(v);
      bool ok = true;
      for (const auto& p : out) {
        if (dot(p.mean_direction, cand) > max_cos + 1e-12) {
          ok = false;
          break;
        }
      }
      if (ok) {
        out.push_back({name(i), std::move(cand), cfg.kappa});
        placed = true;
      }
    }
    if (!placed)
      fail(Errc::infeasible, "could not place profile " + std::to_string(i + 1) + " within " +
                                 std::to_string(cfg.max_retries) + " attempts");
  }
  return out;
}

std::string case_file_id(std::uint64_t case_index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "case%03llu", static_cast<unsigned long long>(case_index));
  return buf;
}

ReferenceCase gen_case(const CorpusConfig& cfg, const std::vector<SpeakerProfile>& profiles, std::uint64_t case_index,
                       unsigned jobs) {
  cfg.validate();
  if (profiles.empty()) fail(Errc::config, "no speaker profiles");
  const std::string file_id = case_file_id(case_index);

  Annotation truth{file_id, {}};
  KeyedRng rng{cfg.seed, static_cast<std::uint64_t>(Stream::timeline), case_index};
  const auto total_ms = static_cast<long long>(std::llround(cfg.case_duration_s * 1000.0));
  long long t = 0;
  std::size_t prev = profiles.size();
  while (t < total_ms) {
    std::size_t spk;
    if (prev == profiles.size() || profiles.size() == 1) {
      spk = static_cast<std::size_t>(rng.below(profiles.size()));
    } else {
      spk = static_cast<std::size_t>(rng.below(profiles.size() - 1));
      if (spk >= prev) ++spk;
    }
    const auto len = std::max(1LL, static_cast<long long>(std::llround(rng.uniform(cfg.turn_min_s, cfg.turn_max_s) * 1000.0)));
    const long long end = std::min(t + len, total_ms);
    truth.add(static_cast<double>(t) / 1000.0, static_cast<double>(end - t) / 1000.0, profiles[spk].name);
    t = end;
    prev = spk;
  }
  truth.sort();

  const double duration = static_cast<double>(total_ms) / 1000.0;
  const auto n_frames = static_cast<std::size_t>(std::llround(duration * kFramesPerSecond));
  SyntheticEmbedder embedder(profiles, [&truth](double at) { return truth.speaker_at(at); }, cfg.seed, case_index);
  ReferenceCase out;
  out.embeddings = embed_frames(n_frames, cfg.rate, embedder, VadMap::full_span(duration), file_id, jobs);
  out.annotation = std::move(truth);
  return out;
}

Corpus gen_corpus(const CorpusConfig& cfg, unsigned jobs) {
  Corpus corpus;
  corpus.profiles = gen_profiles(cfg);
  for (std::size_t i = 0; i < cfg.n_referenced; ++i) corpus.referenced.push_back(corpus.profiles[i].name);

  auto splits = cfg.splits;
  if (splits.empty()) splits.emplace_back("", cfg.cases);
  std::uint64_t next = cfg.first_case_index;
  for (const auto& [name, count] : splits) {
    CorpusSplit split{name, std::vector<ReferenceCase>(count)};
    const std::uint64_t first = next;
    parallel_for(count, jobs, [&](std::size_t k) { split.cases[k] = gen_case(cfg, corpus.profiles, first + k); });
    next += count;
    corpus.splits.push_back(std::move(split));
  }
  return corpus;
}

void write_corpus(const Corpus& corpus, const CorpusConfig& cfg, const std::string& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);

  json manifest;
  manifest["config"] = json::parse(corpus_config_to_json(cfg));
  manifest["seed"] = cfg.seed;
  json profiles = json::array();
  for (std::size_t i = 0; i < corpus.profiles.size(); ++i)
    profiles.push_back({{"name", corpus.profiles[i].name}, {"referenced", i < cfg.n_referenced}});
  manifest["profiles"] = profiles;
  json cases = json::array();
  for (const auto& split : corpus.splits) {
    const fs::path dir = split.name.empty() ? fs::path(out_dir) : fs::path(out_dir) / split.name;
    fs::create_directories(dir);
    for (const auto& rc : split.cases) {
      const auto dvec = dir / (rc.embeddings.file_id + ".dvec");
      const auto rttm = dir / (rc.embeddings.file_id + ".rttm");
      write_dvec(rc.embeddings, dvec.string());
      write_rttm_file(rc.annotation, rttm.string());
      cases.push_back({{"file_id", rc.embeddings.file_id},
                       {"split", split.name},
                       {"dvec", fs::relative(dvec, out_dir).generic_string()},
                       {"rttm", fs::relative(rttm, out_dir).generic_string()}});
    }
  }
  manifest["cases"] = cases;
  write_file_atomic((fs::path(out_dir) / "manifest.json").string(), manifest.dump(2) + "\n");

  std::string allow;
  for (const auto& name : corpus.referenced) allow += name + "\n";
  write_file_atomic((fs::path(out_dir) / "allowlist.txt").string(), allow);
}

CorpusConfig corpus_config_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    fail(Errc::format, std::string("corpus config: ") + e.what());
  }
  CorpusConfig cfg;
  try {
    cfg.n_speakers = j.value("n_speakers", cfg.n_speakers);
    cfg.n_referenced = j.value("n_referenced", cfg.n_referenced);
    cfg.dim = j.value("dim", cfg.dim);
    cfg.rate = j.value("rate", cfg.rate);
    cfg.cases = j.value("cases", cfg.cases);
    cfg.case_duration_s = j.value("case_duration_s", cfg.case_duration_s);
    if (j.contains("turn_len_s")) {
      const auto& t = j.at("turn_len_s");
      cfg.turn_min_s = t.at(0).get<double>();
      cfg.turn_max_s = t.at(1).get<double>();
    }
    cfg.seed = j.value("seed", cfg.seed);
    if (j.contains("kappa")) {
      const auto& k = j.at("kappa");
      if (k.is_null() || (k.is_string() && k.get<std::string>() == "inf")) {
        cfg.kappa = kZeroNoise;
      } else {
        cfg.kappa = k.get<double>();
      }
    }
    cfg.min_pairwise_angle_deg = j.value("min_pairwise_angle_deg", cfg.min_pairwise_angle_deg);
    cfg.max_retries = j.value("max_retries", cfg.max_retries);
    cfg.first_case_index = j.value("first_case_index", cfg.first_case_index);
    if (j.contains("splits")) {
      for (const auto& s : j.at("splits"))
        cfg.splits.emplace_back(s.at("name").get<std::string>(), s.at("cases").get<std::size_t>());
    }
  } catch (const json::exception& e) {
    fail(Errc::format, std::string("corpus config: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

std::string corpus_config_to_json(const CorpusConfig& cfg) {
  json j;
  j["n_speakers"] = cfg.n_speakers;
  j["n_referenced"] = cfg.n_referenced;
  j["dim"] = cfg.dim;
  j["rate"] = cfg.rate;
  j["cases"] = cfg.cases;
  j["case_duration_s"] = cfg.case_duration_s;
  j["turn_len_s"] = {cfg.turn_min_s, cfg.turn_max_s};
  j["seed"] = cfg.seed;
  if (std::isinf(cfg.kappa)) {
    j["kappa"] = "inf";
  } else {
    j["kappa"] = cfg.kappa;
  }
  j["min_pairwise_angle_deg"] = cfg.min_pairwise_angle_deg;
  j["max_retries"] = cfg.max_retries;
  j["first_case_index"] = cfg.first_case_index;
  json splits = json::array();
  for (const auto& [name, count] : cfg.splits) splits.push_back({{"name", name}, {"cases", count}});
  j["splits"] = splits;
  return j.dump(2);
}

}  // namespace rdsv
