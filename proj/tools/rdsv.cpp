// rdsv: reference-dependent speaker diarization pipeline.
//
//   embed      WAV -> DVEC1 (energy VAD, mel frontend, projection embedder)
//   build-ral  DVEC1 + RTTM reference cases -> RAL1 library
//   diarize    RAL1 + DVEC1 -> hypothesis RTTM
//   eval       reference RTTM vs hypothesis RTTM -> DER table / JSON
//   tune       threshold grid search over a dev set
//   simulate   synthetic corpus (DVEC1 + RTTM + manifest)
//   probe      one-vs-rest separability probe across rates
//
// Exit codes: 0 success, 2 usage, 3 data/format error, 4 constraint error.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>

#include <CLI11.hpp>

#include "cli_support.hpp"
#include "rdsv/analysis.hpp"
#include "rdsv/audio.hpp"
#include "rdsv/diarizer.hpp"
#include "rdsv/dvec_file.hpp"
#include "rdsv/embedders.hpp"
#include "rdsv/error.hpp"
#include "rdsv/fileio.hpp"
#include "rdsv/metrics.hpp"
#include "rdsv/ral.hpp"
#include "rdsv/synthetic.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace rdsv::cli {
namespace {

struct EmbedArgs {
  std::string wav, out, file_id;
  double rate = 5.0;
  std::size_t dim = kDefaultDim;
  std::uint64_t seed = 0;
  VadConfig vad;
  unsigned jobs = default_jobs();
};

void run_embed(const EmbedArgs& a) {
  check_rate(a.rate);
  RunManifest manifest("embed");
  manifest.input(a.wav);
  const auto audio = load_wav(a.wav);
  const auto vad = detect_voice(audio, a.vad);
  const auto speech = concatenate_speech(audio, vad);
  const std::string file_id = a.file_id.empty() ? fs::path(a.wav).stem().string() : a.file_id;

  const ProjectionEmbedder embedder(a.dim, a.seed);
  EmbeddingSequence seq;
  if (speech.samples.size() >= 400) {
    seq = embed(mel_spectrogram(speech), a.rate, embedder, vad, file_id, a.jobs);
  } else {
    seq = EmbeddingSequence{file_id, a.rate, a.dim, kSampleRate, {}, vad};
  }
  write_dvec(seq, a.out);
  manifest.output(a.out);
  manifest.config() = {{"rate", a.rate},
                       {"dim", a.dim},
                       {"seed", a.seed},
                       {"embedder", "projection"},
                       {"vad",
                        {{"frame_ms", a.vad.frame_ms},
                         {"energy_ratio", a.vad.energy_ratio},
                         {"smooth_frames", a.vad.smooth_frames},
                         {"min_speech_ms", a.vad.min_speech_ms},
                         {"max_gap_ms", a.vad.max_gap_ms}}}};
  manifest.write(a.out + ".manifest.json");
  std::printf("%s: %zu windows at rate %g over %.2f s of speech (%zu VAD segments)\n", file_id.c_str(), seq.size(),
              a.rate, vad.total_speech(), vad.segments.size());
}

struct BuildRalArgs {
  std::string dvec_dir, allowlist, out, unk_label = "UNK";
  std::vector<std::string> rttm;
  double min_audio_len = 1.0;
  std::size_t min_ref_count = 5;
  unsigned jobs = default_jobs();
};

void run_build_ral(const BuildRalArgs& a) {
  RunManifest manifest("build-ral");
  RalConfig cfg;
  cfg.min_audio_len = a.min_audio_len;
  cfg.min_ref_count = a.min_ref_count;
  if (!a.allowlist.empty()) {
    cfg.allowlist = read_allowlist(a.allowlist);
    if (cfg.allowlist->contains(a.unk_label))
      fail(Errc::config, "allowlist contains the reserved unknown label '" + a.unk_label + "'");
    manifest.input(a.allowlist);
  }
  auto seqs = load_sequences(a.dvec_dir);
  const auto truth = load_annotations(a.rttm);
  manifest.input(a.dvec_dir);
  for (const auto& r : a.rttm) manifest.input(r);

  std::vector<ReferenceCase> refs;
  std::string missing;
  for (auto& seq : seqs) {
    auto it = truth.find(seq.file_id);
    if (it == truth.end()) {
      missing += " " + seq.file_id;
      continue;
    }
    refs.push_back({std::move(seq), it->second});
  }
  if (!missing.empty()) fail(Errc::file_id_mismatch, "no RTTM annotation for:" + missing);

  const auto lib = build_ral(refs, cfg, a.jobs);
  write_ral(lib, a.out);
  manifest.output(a.out);
  manifest.config() = {{"min_audio_len", a.min_audio_len},
                       {"min_ref_count", a.min_ref_count},
                       {"allowlist", a.allowlist.empty() ? json(nullptr) : json(a.allowlist)}};
  manifest.write(a.out + ".manifest.json");
  std::printf("%-20s %s\n", "speaker", "references");
  for (const auto& [name, vecs] : lib.entries) std::printf("%-20s %zu\n", name.c_str(), vecs.size());
}

struct DiarizeArgs {
  std::string ral, dvec, out, segments, unknown_rule = "paper_literal";
  DiarizerConfig cfg;
  unsigned jobs = default_jobs();
};

void run_diarize(DiarizeArgs a) {
  a.cfg.unknown_rule = parse_unknown_rule(a.unknown_rule);
  a.cfg.validate();
  RunManifest manifest("diarize");
  const auto lib = read_ral(a.ral);
  manifest.input(a.ral);
  manifest.input(a.dvec);
  if (lib.speakers().contains(a.cfg.unk_label))
    fail(Errc::config, "library roster contains the reserved unknown label '" + a.cfg.unk_label + "'");

  const bool dir_mode = fs::is_directory(a.dvec);
  if (dir_mode) fs::create_directories(a.out);
  for (const auto& seq : load_sequences(a.dvec)) {
    const auto hyp = diarize(lib, seq, a.cfg, a.jobs);
    const std::string out = dir_mode ? (fs::path(a.out) / (seq.file_id + ".rttm")).string() : a.out;
    write_rttm_file(hyp, out);
    manifest.output(out);
    if (!a.segments.empty()) {
      const std::string seg = dir_mode ? (fs::path(a.segments) / (seq.file_id + ".segments.txt")).string() : a.segments;
      if (dir_mode) fs::create_directories(a.segments);
      write_file_atomic(seg, segment_dump(hyp));
      manifest.output(seg);
    }
    std::printf("%s: %zu segments\n", seq.file_id.c_str(), hyp.segments.size());
  }
  manifest.config() = {{"score_thresh", a.cfg.score_thresh},
                       {"sim_thresh", a.cfg.sim_thresh},
                       {"unknown_rule", unknown_rule_name(a.cfg.unknown_rule)},
                       {"unk_label", a.cfg.unk_label},
                       {"min_segment_s", a.cfg.min_segment_s}};
  manifest.write((dir_mode ? (fs::path(a.out) / "diarize").string() : a.out) + ".manifest.json");
}

struct EvalArgs {
  std::vector<std::string> ref, hyp;
  std::string roster, json_out, unk_label = "UNK";
  double collar = 0.5;
};

double speech_union(const Annotation& a) {
  Annotation merged = a;
  for (auto& s : merged.segments) s.speaker = "_";
  merged.normalize();
  return merged.total_duration();
}

void run_eval(const EvalArgs& a) {
  RunManifest manifest("eval");
  const auto refs = load_annotations(a.ref);
  const auto hyps = load_annotations(a.hyp);
  for (const auto& p : a.ref) manifest.input(p);
  for (const auto& p : a.hyp) manifest.input(p);
  std::set<std::string> roster;
  if (!a.roster.empty()) {
    roster = load_roster(a.roster);
    manifest.input(a.roster);
  }
  if (refs.empty()) fail(Errc::config, "no reference annotations found");

  std::string missing;
  for (const auto& [id, r] : refs)
    if (!hyps.contains(id)) missing += " " + id;
  if (!missing.empty()) fail(Errc::file_id_mismatch, "no hypothesis for reference case(s):" + missing);

  std::vector<DerReport> reports;
  std::vector<CaseDuration> durations;
  json cases = json::array();
  std::printf("%-16s %9s %9s %9s %9s %8s\n", "file_id", "ref_s", "missed_s", "fa_s", "conf_s", "DER");
  for (const auto& [id, r] : refs) {
    const Annotation ref = a.roster.empty() ? r : relabel_unreferenced(r, roster, a.unk_label);
    const auto rep = der(ref, hyps.at(id), a.collar);
    reports.push_back(rep);
    durations.push_back({r.extent(), speech_union(r)});
    auto j = der_json(rep);
    j["file_id"] = id;
    cases.push_back(j);
    std::printf("%-16s %9.2f %9.2f %9.2f %9.2f %7.2f%%\n", id.c_str(), rep.total_ref, rep.missed, rep.false_alarm,
                rep.confusion, 100.0 * rep.der);
  }
  const auto agg = aggregate(reports, durations);
  std::printf("n=%zu  mean DER %.2f%%  std %.2f%%  max %.2f%%\n", agg.case_count, 100.0 * agg.mean_der,
              100.0 * agg.std_der, 100.0 * agg.max_der);
  if (!a.json_out.empty()) {
    json doc = aggregate_json(agg);
    doc["collar"] = a.collar;
    doc["cases"] = cases;
    emit_json(doc, a.json_out);
    if (a.json_out != "-") {
      manifest.output(a.json_out);
      manifest.config() = {{"collar", a.collar}, {"roster", a.roster}, {"unk_label", a.unk_label}};
      manifest.write(a.json_out + ".manifest.json");
    }
  }
}

std::vector<ReferenceCase> load_cases(const std::string& dvec_dir, const std::vector<std::string>& rttm) {
  auto seqs = load_sequences(dvec_dir);
  const auto truth = load_annotations(rttm);
  std::vector<ReferenceCase> out;
  std::string missing;
  for (auto& seq : seqs) {
    auto it = truth.find(seq.file_id);
    if (it == truth.end()) {
      missing += " " + seq.file_id;
      continue;
    }
    out.push_back({std::move(seq), it->second});
  }
  if (!missing.empty()) fail(Errc::file_id_mismatch, "no RTTM annotation for:" + missing);
  return out;
}

struct TuneArgs {
  std::string dev_dvec_dir, ral, json_out, unknown_rule = "paper_literal";
  std::vector<std::string> dev_rttm;
  std::vector<double> score_grid = kDefaultScoreGrid;
  std::vector<double> sim_grid = kDefaultSimGrid;
  double collar = 0.5;
  DiarizerConfig base;
  unsigned jobs = default_jobs();
};

void run_tune(TuneArgs a) {
  a.base.unknown_rule = parse_unknown_rule(a.unknown_rule);
  RunManifest manifest("tune");
  const auto lib = read_ral(a.ral);
  const auto dev = load_cases(a.dev_dvec_dir, a.dev_rttm);
  manifest.input(a.ral);
  manifest.input(a.dev_dvec_dir);
  const auto result = grid_search(dev, lib, a.score_grid, a.sim_grid, a.collar, a.base, a.jobs);

  std::printf("%12s %12s %10s %10s\n", "score_thresh", "sim_thresh", "mean_DER", "std_DER");
  json grid = json::array();
  for (const auto& c : result.grid) {
    std::printf("%12.3f %12.3f %9.2f%% %9.2f%%\n", c.score_thresh, c.sim_thresh, 100.0 * c.mean_der,
                100.0 * c.std_der);
    grid.push_back({{"score_thresh", c.score_thresh}, {"sim_thresh", c.sim_thresh}, {"mean_der", c.mean_der},
                    {"std_der", c.std_der}});
  }
  std::printf("best: score_thresh=%g sim_thresh=%g mean DER %.2f%%\n", result.best.score_thresh,
              result.best.sim_thresh, 100.0 * result.best.mean_der);
  if (!a.json_out.empty()) {
    json doc{{"grid", grid},
             {"best",
              {{"score_thresh", result.best.score_thresh},
               {"sim_thresh", result.best.sim_thresh},
               {"mean_der", result.best.mean_der},
               {"std_der", result.best.std_der}}},
             {"n", dev.size()},
             {"collar", a.collar},
             {"unknown_rule", unknown_rule_name(a.base.unknown_rule)}};
    emit_json(doc, a.json_out);
    if (a.json_out != "-") {
      manifest.output(a.json_out);
      manifest.config() = {{"score_grid", a.score_grid}, {"sim_grid", a.sim_grid}, {"collar", a.collar}};
      manifest.write(a.json_out + ".manifest.json");
    }
  }
}

struct SimulateArgs {
  std::string config, out_dir;
  unsigned jobs = default_jobs();
};

void run_simulate(const SimulateArgs& a) {
  RunManifest manifest("simulate");
  CorpusConfig cfg;
  if (!a.config.empty()) {
    cfg = corpus_config_from_json(read_file_text(a.config));
    manifest.input(a.config);
  }
  cfg.validate();
  const auto corpus = gen_corpus(cfg, a.jobs);
  write_corpus(corpus, cfg, a.out_dir);
  manifest.output(a.out_dir);
  manifest.config() = json::parse(corpus_config_to_json(cfg));
  manifest.write((fs::path(a.out_dir) / "run.manifest.json").string());
  std::size_t n = 0;
  for (const auto& s : corpus.splits) n += s.cases.size();
  std::printf("wrote %zu cases, %zu speakers (%zu referenced) to %s\n", n, corpus.profiles.size(),
              corpus.referenced.size(), a.out_dir.c_str());
}

struct ProbeArgs {
  std::vector<std::string> ral_sets, dev_sets;
  std::string allowlist, json_out, nonjudge = "non-judge";
  std::vector<double> rates = kDefaultProbeRates;
  std::vector<double> thresholds = kDefaultProbeThresholds;
  unsigned jobs = default_jobs();
};

// Cases grouped by the rate recorded in their DVEC1 headers.
std::map<double, std::vector<ReferenceCase>> cases_by_rate(const std::vector<std::string>& dirs) {
  std::map<double, std::vector<ReferenceCase>> out;
  for (const auto& dir : dirs) {
    for (auto& rc : load_cases(dir, {dir})) {
      const double rate = rc.embeddings.rate;
      out[rate].push_back(std::move(rc));
    }
  }
  return out;
}

void run_probe(const ProbeArgs& a) {
  RunManifest manifest("probe");
  const auto judges = read_allowlist(a.allowlist);
  if (judges.contains(a.nonjudge)) fail(Errc::config, "allowlist contains the non-judge label");
  const auto train_sets = cases_by_rate(a.ral_sets);
  const auto dev_sets = cases_by_rate(a.dev_sets);
  std::vector<ProbeSet> sets;
  for (double rate : a.rates) {
    check_rate(rate);
    if (!train_sets.contains(rate) || !dev_sets.contains(rate))
      fail(Errc::config, "no reference and dev embeddings at rate " + std::to_string(rate));
    ProbeSet set;
    set.rate = rate;
    for (const auto& rc : train_sets.at(rate)) label_windows(rc.embeddings, rc.annotation, judges, a.nonjudge, true, set.train);
    for (const auto& rc : dev_sets.at(rate)) label_windows(rc.embeddings, rc.annotation, judges, a.nonjudge, false, set.dev);
    sets.push_back(std::move(set));
  }
  const auto result = probe(sets, a.thresholds, a.nonjudge, {}, a.jobs);

  std::printf("%6s %9s %9s %12s %7s\n", "rate", "threshold", "accuracy", "judge_recall", "n_dev");
  json cells = json::array();
  for (const auto& c : result.cells) {
    std::printf("%6g %9.3f %9.4f %12.4f %7zu\n", c.rate, c.threshold, c.accuracy, c.judge_recall, c.n_dev);
    cells.push_back({{"rate", c.rate},
                     {"threshold", c.threshold},
                     {"accuracy", c.accuracy},
                     {"judge_recall", c.judge_recall},
                     {"n_dev", c.n_dev}});
  }
  if (!a.json_out.empty()) {
    emit_json(json{{"cells", cells}}, a.json_out);
    if (a.json_out != "-") {
      for (const auto& d : a.ral_sets) manifest.input(d);
      for (const auto& d : a.dev_sets) manifest.input(d);
      manifest.output(a.json_out);
      manifest.config() = {{"rates", a.rates}, {"prob_thresholds", a.thresholds}};
      manifest.write(a.json_out + ".manifest.json");
    }
  }
}

int exit_code_for(const Error& e) { return is_data_error(e.code()) ? 3 : 4; }

}  // namespace
}  // namespace rdsv::cli

int main(int argc, char** argv) {
  using namespace rdsv;
  using namespace rdsv::cli;

  CLI::App app{"Reference-dependent speaker diarization"};
  app.require_subcommand(1);

  EmbedArgs embed_args;
  auto* embed_cmd = app.add_subcommand("embed", "Embed a 16 kHz WAV into a DVEC1 file");
  embed_cmd->add_option("--wav", embed_args.wav, "Input WAV (16 kHz, PCM16 or float32)")->required();
  embed_cmd->add_option("--rate", embed_args.rate, "Windows per second of speech [0.625, 100]")->capture_default_str();
  embed_cmd->add_option("--out", embed_args.out, "Output DVEC1 path")->required();
  embed_cmd->add_option("--file-id", embed_args.file_id, "Recording id (default: WAV stem)");
  embed_cmd->add_option("--dim", embed_args.dim, "Embedding dimension")->capture_default_str();
  embed_cmd->add_option("--seed", embed_args.seed, "Projection seed")->capture_default_str();
  embed_cmd->add_option("--vad-frame-ms", embed_args.vad.frame_ms, "VAD frame (10, 20 or 30 ms)")->capture_default_str();
  embed_cmd->add_option("--vad-energy-ratio", embed_args.vad.energy_ratio, "Speech iff RMS > ratio * p95 RMS")
      ->capture_default_str();
  embed_cmd->add_option("--vad-smooth-frames", embed_args.vad.smooth_frames, "Moving-average width")
      ->capture_default_str();
  embed_cmd->add_option("--vad-min-speech-ms", embed_args.vad.min_speech_ms, "Drop shorter speech runs")
      ->capture_default_str();
  embed_cmd->add_option("--vad-max-gap-ms", embed_args.vad.max_gap_ms, "Bridge shorter gaps")->capture_default_str();
  embed_cmd->add_option("--jobs", embed_args.jobs, "Worker threads (default $RDSV_JOBS or 1)");

  BuildRalArgs ral_args;
  auto* ral_cmd = app.add_subcommand("build-ral", "Build a reference audio library");
  ral_cmd->add_option("--dvec-dir", ral_args.dvec_dir, "Directory of reference DVEC1 files")->required();
  ral_cmd->add_option("--rttm", ral_args.rttm, "Reference RTTM file(s) or directory")->required();
  ral_cmd->add_option("--allowlist", ral_args.allowlist, "Speakers to retain, one per line");
  ral_cmd->add_option("--min-audio-len", ral_args.min_audio_len, "Minimum interval length (s)")->capture_default_str();
  ral_cmd->add_option("--min-ref-count", ral_args.min_ref_count, "Minimum references per speaker")
      ->capture_default_str();
  ral_cmd->add_option("--unk-label", ral_args.unk_label, "Reserved unknown label")->capture_default_str();
  ral_cmd->add_option("--out", ral_args.out, "Output RAL1 path")->required();
  ral_cmd->add_option("--jobs", ral_args.jobs, "Worker threads");

  DiarizeArgs dia_args;
  auto* dia_cmd = app.add_subcommand("diarize", "Label a case against a reference library");
  dia_cmd->add_option("--ral", dia_args.ral, "RAL1 library")->required();
  dia_cmd->add_option("--dvec", dia_args.dvec, "DVEC1 file or directory")->required();
  dia_cmd->add_option("--out", dia_args.out, "Output RTTM file (or directory for a DVEC1 directory)")->required();
  dia_cmd->add_option("--score-thresh", dia_args.cfg.score_thresh, "Unknown if best score below this")
      ->capture_default_str();
  dia_cmd->add_option("--sim-thresh", dia_args.cfg.sim_thresh, "Margin threshold")->capture_default_str();
  dia_cmd->add_option("--unknown-rule", dia_args.unknown_rule, "paper_literal | margin_below")->capture_default_str();
  dia_cmd->add_option("--unk-label", dia_args.cfg.unk_label, "Label for unreferenced speakers")->capture_default_str();
  dia_cmd->add_option("--min-segment", dia_args.cfg.min_segment_s, "Absorb runs shorter than this (s)")
      ->capture_default_str();
  dia_cmd->add_option("--segments", dia_args.segments, "Also write an onset/end/speaker text dump");
  dia_cmd->add_option("--jobs", dia_args.jobs, "Worker threads");

  EvalArgs eval_args;
  auto* eval_cmd = app.add_subcommand("eval", "Diarization error rate of hypotheses against references");
  eval_cmd->add_option("--ref", eval_args.ref, "Reference RTTM file(s) or directory")->required();
  eval_cmd->add_option("--hyp", eval_args.hyp, "Hypothesis RTTM file(s) or directory")->required();
  eval_cmd->add_option("--collar", eval_args.collar, "Total collar (s), split across each boundary")
      ->capture_default_str();
  eval_cmd->add_option("--roster", eval_args.roster, "RAL1 or allowlist; other reference speakers become UNK");
  eval_cmd->add_option("--unk-label", eval_args.unk_label, "Unknown label")->capture_default_str();
  eval_cmd->add_option("--json", eval_args.json_out, "Write JSON report to this path ('-' for stdout)");

  TuneArgs tune_args;
  auto* tune_cmd = app.add_subcommand("tune", "Grid search over score/sim thresholds");
  tune_cmd->add_option("--dev-dvec-dir", tune_args.dev_dvec_dir, "Dev DVEC1 directory")->required();
  tune_cmd->add_option("--dev-rttm", tune_args.dev_rttm, "Dev RTTM file(s) or directory")->required();
  tune_cmd->add_option("--ral", tune_args.ral, "RAL1 library")->required();
  tune_cmd->add_option("--score-grid", tune_args.score_grid, "Comma-separated score thresholds")
      ->delimiter(',')
      ->capture_default_str();
  tune_cmd->add_option("--sim-grid", tune_args.sim_grid, "Comma-separated sim thresholds")
      ->delimiter(',')
      ->capture_default_str();
  tune_cmd->add_option("--collar", tune_args.collar, "Total collar (s)")->capture_default_str();
  tune_cmd->add_option("--unknown-rule", tune_args.unknown_rule, "paper_literal | margin_below")
      ->capture_default_str();
  tune_cmd->add_option("--unk-label", tune_args.base.unk_label, "Unknown label")->capture_default_str();
  tune_cmd->add_option("--min-segment", tune_args.base.min_segment_s, "Smoothing (s)")->capture_default_str();
  tune_cmd->add_option("--json", tune_args.json_out, "Write JSON result ('-' for stdout)");
  tune_cmd->add_option("--jobs", tune_args.jobs, "Worker threads");

  SimulateArgs sim_args;
  auto* sim_cmd = app.add_subcommand("simulate", "Generate a synthetic corpus");
  sim_cmd->add_option("--config", sim_args.config, "Corpus config JSON (defaults when omitted)");
  sim_cmd->add_option("--out-dir", sim_args.out_dir, "Output directory")->required();
  sim_cmd->add_option("--jobs", sim_args.jobs, "Worker threads");

  ProbeArgs probe_args;
  auto* probe_cmd = app.add_subcommand("probe", "One-vs-rest separability probe");
  probe_cmd->add_option("--ral-set", probe_args.ral_sets, "Directory of reference DVEC1+RTTM (repeatable)")->required();
  probe_cmd->add_option("--dev-set", probe_args.dev_sets, "Directory of dev DVEC1+RTTM (repeatable)")->required();
  probe_cmd->add_option("--allowlist", probe_args.allowlist, "Judge roster")->required();
  probe_cmd->add_option("--rates", probe_args.rates, "Comma-separated rates")->delimiter(',')->capture_default_str();
  probe_cmd->add_option("--prob-thresholds", probe_args.thresholds, "Comma-separated probability thresholds")
      ->delimiter(',')
      ->capture_default_str();
  probe_cmd->add_option("--nonjudge-label", probe_args.nonjudge, "Label for pooled non-judges")->capture_default_str();
  probe_cmd->add_option("--json", probe_args.json_out, "Write JSON result ('-' for stdout)");
  probe_cmd->add_option("--jobs", probe_args.jobs, "Worker threads");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*embed_cmd) run_embed(embed_args);
    if (*ral_cmd) run_build_ral(ral_args);
    if (*dia_cmd) run_diarize(dia_args);
    if (*eval_cmd) run_eval(eval_args);
    if (*tune_cmd) run_tune(tune_args);
    if (*sim_cmd) run_simulate(sim_args);
    if (*probe_cmd) run_probe(probe_args);
  } catch (const Error& e) {
    std::cerr << "rdsv: " << e.what() << " [" << errc_name(e.code()) << "]\n";
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "rdsv: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
