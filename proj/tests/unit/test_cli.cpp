#include <doctest.h>

#include <sys/wait.h>

#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <numbers>

#include <json.hpp>

#include "rdsv/audio.hpp"
#include "rdsv/dvec_file.hpp"
#include "rdsv/embedding.hpp"
#include "rdsv/fileio.hpp"
#include "rdsv/ral.hpp"
#include "rdsv/rttm.hpp"
#include "support.hpp"

using namespace rdsv;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code = -1;
  std::string out;  // stdout and stderr
};

Run rdsv_cli(const std::string& args) {
  const std::string cmd = std::string(RDSV_CLI_PATH) + " " + args + " 2>&1";
  Run r;
  FILE* pipe = ::popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::array<char, 4096> buf{};
  while (std::fgets(buf.data(), buf.size(), pipe)) r.out += buf.data();
  const int status = ::pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

// Simulated corpus with ref/dev/test splits under dir/corpus.
std::string simulate(const test::TempDir& dir, const std::string& extra = "") {
  const std::string cfg = dir.file("cfg.json");
  write_file_atomic(cfg, R"({"n_speakers": 6, "n_referenced": 4, "dim": 256, "case_duration_s": 120,
                            "splits": [{"name": "ref", "cases": 5}, {"name": "dev", "cases": 2},
                                       {"name": "test", "cases": 2}])" + extra + "}");
  const auto out = dir.file("corpus");
  const auto r = rdsv_cli("simulate --config " + cfg + " --out-dir " + out);
  REQUIRE_MESSAGE(r.code == 0, r.out);
  return out;
}

std::map<std::string, std::vector<std::uint8_t>> tree(const fs::path& root) {
  std::map<std::string, std::vector<std::uint8_t>> out;
  for (const auto& e : fs::recursive_directory_iterator(root))
    if (e.is_regular_file() && e.path().filename() != "run.manifest.json")
      out[fs::relative(e.path(), root).string()] = read_file_bytes(e.path().string());
  return out;
}

}  // namespace

TEST_CASE("usage errors exit 2") {
  CHECK(rdsv_cli("").code == 2);
  CHECK(rdsv_cli("frobnicate").code == 2);
  CHECK(rdsv_cli("eval --ref x").code == 2);
  CHECK(rdsv_cli("--help").code == 0);
}

TEST_CASE("simulate is reproducible and marks unreferenced speakers") {
  test::TempDir a, b;
  const auto ca = simulate(a);
  const auto cb = simulate(b);
  CHECK(tree(ca) == tree(cb));
  const auto m = nlohmann::json::parse(read_file_text(ca + "/manifest.json"));
  CHECK(m["profiles"][3]["referenced"] == true);
  CHECK(m["profiles"][4]["referenced"] == false);
  CHECK(fs::exists(ca + "/run.manifest.json"));
}

TEST_CASE("build-ral, diarize, eval and tune pipeline") {
  test::TempDir dir;
  const auto c = simulate(dir);
  const auto ral = dir.file("lib.ral");
  auto r = rdsv_cli("build-ral --dvec-dir " + c + "/ref --rttm " + c + "/ref --allowlist " + c + "/allowlist.txt --out " + ral);
  REQUIRE_MESSAGE(r.code == 0, r.out);
  CHECK(read_ral(ral).speakers() == std::set<std::string>{"spk01", "spk02", "spk03", "spk04"});
  const auto manifest = nlohmann::json::parse(read_file_text(ral + ".manifest.json"));
  CHECK(manifest["command"] == "build-ral");
  CHECK(manifest["outputs"][0] == ral);
  CHECK(manifest.contains("tool_version"));
  CHECK(manifest.contains("wall_time_s"));
  CHECK(manifest["config"]["min_ref_count"] == 5);

  // Defaults (literal rule) and the margin_below switch both emit RTTM.
  r = rdsv_cli("diarize --ral " + ral + " --dvec " + c + "/test --out " + dir.file("hyp_lit"));
  REQUIRE_MESSAGE(r.code == 0, r.out);
  r = rdsv_cli("diarize --ral " + ral + " --dvec " + c + "/test --out " + dir.file("hyp_mb") +
               " --unknown-rule margin_below --segments " + dir.file("seg"));
  REQUIRE_MESSAGE(r.code == 0, r.out);
  CHECK(fs::exists(dir.file("hyp_lit/case007.rttm")));
  CHECK(fs::exists(dir.file("seg/case007.segments.txt")));
  CHECK(read_file_bytes(dir.file("hyp_lit/case007.rttm")) != read_file_bytes(dir.file("hyp_mb/case007.rttm")));

  // Single-file mode.
  r = rdsv_cli("diarize --ral " + ral + " --dvec " + c + "/test/case008.dvec --out " + dir.file("one.rttm"));
  REQUIRE_MESSAGE(r.code == 0, r.out);
  CHECK(read_rttm_file(dir.file("one.rttm"))[0].file_id == "case008");

  r = rdsv_cli("eval --ref " + c + "/test --hyp " + dir.file("hyp_mb") + " --roster " + ral + " --json " + dir.file("e.json"));
  REQUIRE_MESSAGE(r.code == 0, r.out);
  const auto report = nlohmann::json::parse(read_file_text(dir.file("e.json")));
  for (const char* k : {"mean_der", "std_der", "max_der", "n"}) CHECK(report.contains(k));
  CHECK(report["n"] == 2);
  CHECK(report["mean_der"] == 0.0);
  for (const char* k : {"total_ref_s", "missed_s", "false_alarm_s", "confusion_s", "der"})
    CHECK(report["cases"][0].contains(k));

  // Identical files score zero.
  r = rdsv_cli("eval --ref " + c + "/test --hyp " + c + "/test --json -");
  REQUIRE_MESSAGE(r.code == 0, r.out);
  CHECK(r.out.find("\"mean_der\": 0.0") != std::string::npos);

  // A reference case without a hypothesis is named in the error.
  r = rdsv_cli("eval --ref " + c + "/dev --hyp " + dir.file("hyp_mb"));
  CHECK(r.code == 3);
  CHECK(r.out.find("case005") != std::string::npos);
  CHECK(r.out.find("case006") != std::string::npos);

  r = rdsv_cli("tune --dev-dvec-dir " + c + "/dev --dev-rttm " + c + "/dev --ral " + ral +
               " --unknown-rule margin_below --json " + dir.file("t.json") + " --jobs 2");
  REQUIRE_MESSAGE(r.code == 0, r.out);
  CHECK(r.out.find("best:") != std::string::npos);
  const auto tune = nlohmann::json::parse(read_file_text(dir.file("t.json")));
  CHECK(tune["grid"].size() == 16);
  CHECK(tune["best"]["mean_der"] == 0.0);
  r = rdsv_cli("tune --dev-dvec-dir " + c + "/dev --dev-rttm " + c + "/dev --ral " + ral +
               " --score-grid 0.8,0.9 --sim-grid 0.1 --json -");
  REQUIRE_MESSAGE(r.code == 0, r.out);
  CHECK(r.out.find("\"score_thresh\": 0.9") != std::string::npos);
}

TEST_CASE("build-ral and diarize constraint errors") {
  test::TempDir dir;
  const auto c = simulate(dir);
  write_file_atomic(dir.file("empty.txt"), "# nobody\n");
  auto r = rdsv_cli("build-ral --dvec-dir " + c + "/ref --rttm " + c + "/ref --allowlist " + dir.file("empty.txt") +
                    " --out " + dir.file("x.ral"));
  CHECK(r.code == 4);
  CHECK_FALSE(fs::exists(dir.file("x.ral")));

  write_file_atomic(dir.file("unk.txt"), "spk01\nUNK\n");
  r = rdsv_cli("build-ral --dvec-dir " + c + "/ref --rttm " + c + "/ref --allowlist " + dir.file("unk.txt") + " --out " +
               dir.file("x.ral"));
  CHECK(r.code == 4);

  // Mixed dimensions across reference DVEC files.
  test::TempDir other;
  write_file_atomic(other.file("cfg.json"), R"({"dim": 16, "cases": 1, "case_duration_s": 60, "first_case_index": 50})");
  REQUIRE(rdsv_cli("simulate --config " + other.file("cfg.json") + " --out-dir " + other.file("c")).code == 0);
  fs::copy_file(other.file("c/case050.dvec"), c + "/ref/case050.dvec");
  fs::copy_file(other.file("c/case050.rttm"), c + "/ref/case050.rttm");
  r = rdsv_cli("build-ral --dvec-dir " + c + "/ref --rttm " + c + "/ref --out " + dir.file("x.ral"));
  CHECK(r.code == 4);
  CHECK(r.out.find("dimension") != std::string::npos);

  r = rdsv_cli("diarize --ral " + dir.file("missing.ral") + " --dvec " + c + "/test --out " + dir.file("h"));
  CHECK(r.code == 3);
}

TEST_CASE("embed: WAV to DVEC1") {
  test::TempDir dir;
  AudioBuffer b;
  for (int seg = 0; seg < 3; ++seg) {
    for (int i = 0; i < 16000; ++i) b.samples.push_back(0.0f);
    for (int i = 0; i < 32000; ++i)
      b.samples.push_back(static_cast<float>(0.5 * std::sin(2.0 * std::numbers::pi * (200.0 + 100 * seg) * i / 16000.0)));
  }
  write_wav(b, dir.file("a.wav"));
  auto r = rdsv_cli("embed --wav " + dir.file("a.wav") + " --rate 5 --out " + dir.file("a.dvec") + " --dim 64");
  REQUIRE_MESSAGE(r.code == 0, r.out);
  const auto seq = read_dvec(dir.file("a.dvec"));
  CHECK(seq.rate == 5.0);
  CHECK(seq.dim == 64);
  CHECK(seq.file_id == "a");
  CHECK(seq.vad.segments.size() == 3);
  CHECK(window_count_consistent(seq.size(), seq.rate, seq.vad.total_speech()));
  CHECK(fs::exists(dir.file("a.dvec.manifest.json")));

  // Same input, same bytes.
  REQUIRE(rdsv_cli("embed --wav " + dir.file("a.wav") + " --rate 5 --out " + dir.file("b.dvec") + " --dim 64").code == 0);
  CHECK(read_file_bytes(dir.file("a.dvec")) == read_file_bytes(dir.file("b.dvec")));

  r = rdsv_cli("embed --wav " + dir.file("a.wav") + " --rate 0.5 --out " + dir.file("c.dvec"));
  CHECK(r.code == 4);
  CHECK(r.out.find("rate out of bounds [0.625,100]") != std::string::npos);

  r = rdsv_cli("embed --wav " + dir.file("nope.wav") + " --rate 5 --out " + dir.file("c.dvec"));
  CHECK(r.code == 3);
}

TEST_CASE("probe over two rates") {
  test::TempDir dir;
  std::string sets;
  for (const char* rate : {"1", "3"}) {
    const std::string cfg = dir.file(std::string("p") + rate + ".json");
    write_file_atomic(cfg, std::string(R"({"n_speakers": 5, "n_referenced": 3, "dim": 32, "case_duration_s": 60, "rate": )") +
                               rate + R"(, "splits": [{"name": "ref", "cases": 2}, {"name": "dev", "cases": 2}]})");
    const auto out = dir.file(std::string("r") + rate);
    REQUIRE(rdsv_cli("simulate --config " + cfg + " --out-dir " + out).code == 0);
    sets += " --ral-set " + out + "/ref --dev-set " + out + "/dev";
  }
  const auto r = rdsv_cli("probe" + sets + " --allowlist " + dir.file("r1/allowlist.txt") + " --rates 1,3 --json -");
  REQUIRE_MESSAGE(r.code == 0, r.out);
  const auto j = nlohmann::json::parse(r.out.substr(r.out.find('{')));
  REQUIRE(j["cells"].size() == 6);
  for (const auto& c : j["cells"]) CHECK(c["accuracy"] == 1.0);

  const auto missing = rdsv_cli("probe" + sets + " --allowlist " + dir.file("r1/allowlist.txt"));
  CHECK(missing.code == 4);  // default rates 5 and 7 have no embeddings here
}
