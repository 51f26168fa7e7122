#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "rdsv/analysis.hpp"
#include "rdsv/diarizer.hpp"
#include "rdsv/dvec_file.hpp"
#include "rdsv/error.hpp"
#include "rdsv/metrics.hpp"
#include "rdsv/ral.hpp"
#include "rdsv/rttm.hpp"
#include "rdsv/synthetic.hpp"

namespace py = pybind11;
using namespace rdsv;

namespace {

using FloatArray = py::array_t<float, py::array::c_style | py::array::forcecast>;

FloatArray to_array(const std::vector<DVector>& vectors, std::size_t dim) {
  FloatArray out({vectors.size(), dim});
  auto m = out.mutable_unchecked<2>();
  for (std::size_t i = 0; i < vectors.size(); ++i)
    for (std::size_t k = 0; k < dim; ++k) m(i, k) = vectors[i][k];
  return out;
}

// Rows are stored as given; callers must pass unit-norm rows.
std::vector<DVector> from_array(const FloatArray& a, std::size_t& dim) {
  if (a.ndim() != 2) fail(Errc::config, "expected a 2-D array of vectors");
  dim = static_cast<std::size_t>(a.shape(1));
  auto r = a.unchecked<2>();
  std::vector<DVector> out;
  out.reserve(static_cast<std::size_t>(a.shape(0)));
  for (py::ssize_t i = 0; i < a.shape(0); ++i) {
    std::vector<float> row(dim);
    for (std::size_t k = 0; k < dim; ++k) row[k] = r(i, static_cast<py::ssize_t>(k));
    out.emplace_back(std::move(row));
  }
  return out;
}

std::span<const std::uint8_t> as_span(const py::bytes& b) {
  const std::string_view v = b;
  return {reinterpret_cast<const std::uint8_t*>(v.data()), v.size()};
}

py::bytes to_bytes(const std::vector<std::uint8_t>& v) {
  return {reinterpret_cast<const char*>(v.data()), v.size()};
}

std::vector<ReferenceCase> to_cases(const std::vector<std::pair<EmbeddingSequence, Annotation>>& pairs) {
  std::vector<ReferenceCase> out;
  for (const auto& [seq, ann] : pairs) out.push_back({seq, ann});
  return out;
}

}  // namespace

PYBIND11_MODULE(_rdsv, m) {
  m.doc() = "Reference-dependent speaker diarization core";

  static py::exception<Error> exc(m, "RdsvError");
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      // args = (message, code name)
      PyErr_SetObject(exc.ptr(), py::make_tuple(e.what(), std::string(errc_name(e.code()))).ptr());
    }
  });

  py::class_<RttmSegment>(m, "Segment")
      .def(py::init([](std::string file_id, double onset, double duration, std::string speaker) {
             return RttmSegment{std::move(file_id), onset, duration, std::move(speaker)};
           }),
           py::arg("file_id"), py::arg("onset"), py::arg("duration"), py::arg("speaker"))
      .def_readwrite("file_id", &RttmSegment::file_id)
      .def_readwrite("onset", &RttmSegment::onset)
      .def_readwrite("duration", &RttmSegment::duration)
      .def_readwrite("speaker", &RttmSegment::speaker)
      .def_property_readonly("end", &RttmSegment::end)
      .def("__eq__", [](const RttmSegment& a, const RttmSegment& b) { return a == b; })
      .def("__repr__", [](const RttmSegment& s) {
        return "Segment(" + s.file_id + ", " + std::to_string(s.onset) + ", " + std::to_string(s.duration) + ", " +
               s.speaker + ")";
      });

  py::class_<Annotation>(m, "Annotation")
      .def(py::init([](std::string file_id) { return Annotation{std::move(file_id), {}}; }), py::arg("file_id"))
      .def_readwrite("file_id", &Annotation::file_id)
      .def_readwrite("segments", &Annotation::segments)
      .def("add", &Annotation::add, py::arg("onset"), py::arg("duration"), py::arg("speaker"))
      .def("sort", &Annotation::sort)
      .def("normalize", &Annotation::normalize, py::arg("merge_gap") = 0.0)
      .def("speakers", &Annotation::speakers)
      .def("speaker_at", &Annotation::speaker_at)
      .def("total_duration", &Annotation::total_duration)
      .def("extent", &Annotation::extent)
      .def("__eq__", [](const Annotation& a, const Annotation& b) { return a == b; })
      .def("__len__", [](const Annotation& a) { return a.segments.size(); });

  m.def("parse_rttm", py::overload_cast<std::string_view>(&parse_rttm), py::arg("text"));
  m.def("serialize_rttm", &serialize_rttm);
  m.def("read_rttm", &read_rttm_file, py::arg("path"));
  m.def("write_rttm", &write_rttm_file, py::arg("annotation"), py::arg("path"));
  m.def("relabel_unreferenced", &relabel_unreferenced, py::arg("annotation"), py::arg("known"),
        py::arg("unk_label") = "UNK");

  py::class_<DerReport>(m, "DerReport")
      .def(py::init<>())
      .def_readwrite("total_ref", &DerReport::total_ref)
      .def_readwrite("missed", &DerReport::missed)
      .def_readwrite("false_alarm", &DerReport::false_alarm)
      .def_readwrite("confusion", &DerReport::confusion)
      .def_readwrite("der", &DerReport::der);
  py::class_<AggregateReport>(m, "AggregateReport")
      .def_readonly("mean_der", &AggregateReport::mean_der)
      .def_readonly("std_der", &AggregateReport::std_der)
      .def_readonly("max_der", &AggregateReport::max_der)
      .def_readonly("case_count", &AggregateReport::case_count);

  m.def("der", &der, py::arg("reference"), py::arg("hypothesis"), py::arg("collar") = 0.5);
  m.def("frame_oracle_der", &frame_oracle_der, py::arg("reference"), py::arg("hypothesis"), py::arg("collar"),
        py::arg("frame") = 0.005);
  m.def("aggregate", [](const std::vector<DerReport>& r) { return aggregate(r); });

  m.def("window_frames", &window_frames, py::arg("rate"));
  m.def("window_seconds", &window_seconds, py::arg("rate"));
  m.def(
      "window_plan",
      [](std::size_t n_frames, double rate) {
        std::vector<std::pair<std::size_t, std::size_t>> out;
        for (const auto& r : window_plan(n_frames, rate)) out.emplace_back(r.begin, r.end);
        return out;
      },
      py::arg("n_frames"), py::arg("rate"));

  py::class_<EmbeddingSequence>(m, "EmbeddingSequence")
      .def(py::init([](const FloatArray& vectors, double rate, std::string file_id,
                       const std::vector<std::pair<double, double>>& vad) {
             EmbeddingSequence s;
             s.vectors = from_array(vectors, s.dim);
             s.rate = rate;
             s.file_id = std::move(file_id);
             s.vad = VadMap::from_regions(vad);
             return s;
           }),
           py::arg("vectors"), py::arg("rate"), py::arg("file_id"), py::arg("vad"))
      .def_readonly("file_id", &EmbeddingSequence::file_id)
      .def_readonly("rate", &EmbeddingSequence::rate)
      .def_readonly("dim", &EmbeddingSequence::dim)
      .def_property_readonly("vectors", [](const EmbeddingSequence& s) { return to_array(s.vectors, s.dim); })
      .def_property_readonly("vad",
                             [](const EmbeddingSequence& s) {
                               std::vector<std::pair<double, double>> out;
                               for (const auto& v : s.vad.segments) out.emplace_back(v.orig_start, v.orig_end);
                               return out;
                             })
      .def("time_of", [](const EmbeddingSequence& s, std::size_t i) { return time_of(s, i); })
      .def("__len__", &EmbeddingSequence::size);

  m.def("encode_dvec", [](const EmbeddingSequence& s) { return to_bytes(encode_dvec(s)); });
  m.def("decode_dvec", [](const py::bytes& b) { return decode_dvec(as_span(b)); });
  m.def("read_dvec", &read_dvec, py::arg("path"));
  m.def("write_dvec", &write_dvec, py::arg("sequence"), py::arg("path"));

  py::class_<ReferenceAudioLibrary>(m, "ReferenceAudioLibrary")
      .def_readonly("dim", &ReferenceAudioLibrary::dim)
      .def("speakers", &ReferenceAudioLibrary::speakers)
      .def("reference_count", &ReferenceAudioLibrary::reference_count)
      .def("references",
           [](const ReferenceAudioLibrary& lib, const std::string& speaker) {
             const auto it = lib.entries.find(speaker);
             if (it == lib.entries.end()) throw py::key_error(speaker);
             return to_array(it->second, lib.dim);
           })
      .def("__eq__", [](const ReferenceAudioLibrary& a, const ReferenceAudioLibrary& b) { return a == b; });

  m.def(
      "build_ral",
      [](const std::vector<std::pair<EmbeddingSequence, Annotation>>& cases, double min_audio_len,
         std::size_t min_ref_count, std::optional<std::set<std::string>> allowlist, unsigned jobs) {
        RalConfig cfg;
        cfg.min_audio_len = min_audio_len;
        cfg.min_ref_count = min_ref_count;
        cfg.allowlist = std::move(allowlist);
        return build_ral(to_cases(cases), cfg, jobs);
      },
      py::arg("cases"), py::arg("min_audio_len") = 1.0, py::arg("min_ref_count") = 5, py::arg("allowlist") = py::none(),
      py::arg("jobs") = 1);
  m.def("encode_ral", [](const ReferenceAudioLibrary& lib) { return to_bytes(encode_ral(lib)); });
  m.def("decode_ral", [](const py::bytes& b) { return decode_ral(as_span(b)); });
  m.def("read_ral", &read_ral, py::arg("path"));
  m.def("write_ral", &write_ral, py::arg("library"), py::arg("path"));

  py::class_<DiarizerConfig>(m, "DiarizerConfig")
      .def(py::init([](double score_thresh, double sim_thresh, std::string unk_label, double min_segment_s,
                       std::string_view unknown_rule) {
             DiarizerConfig c{score_thresh, sim_thresh, std::move(unk_label), min_segment_s,
                              parse_unknown_rule(unknown_rule)};
             c.validate();
             return c;
           }),
           py::arg("score_thresh") = 0.85, py::arg("sim_thresh") = 0.1, py::arg("unk_label") = "UNK",
           py::arg("min_segment_s") = 0.0, py::arg("unknown_rule") = "paper_literal")
      .def_readonly("score_thresh", &DiarizerConfig::score_thresh)
      .def_readonly("sim_thresh", &DiarizerConfig::sim_thresh)
      .def_readonly("unk_label", &DiarizerConfig::unk_label)
      .def_readonly("min_segment_s", &DiarizerConfig::min_segment_s)
      .def_property_readonly("unknown_rule",
                             [](const DiarizerConfig& c) { return std::string(unknown_rule_name(c.unknown_rule)); });

  m.def(
      "label_timesteps",
      [](const std::vector<std::string>& speakers, py::array_t<double, py::array::c_style | py::array::forcecast> scores,
         const DiarizerConfig& cfg) {
        if (scores.ndim() != 2 || static_cast<std::size_t>(scores.shape(0)) != speakers.size())
          fail(Errc::config, "scores must have shape (len(speakers), n_steps)");
        SpeakerScores s;
        s.speakers = speakers;
        s.n_steps = static_cast<std::size_t>(scores.shape(1));
        s.scores.assign(scores.data(), scores.data() + scores.size());
        return label_timesteps(s, cfg);
      },
      py::arg("speakers"), py::arg("scores"), py::arg("config") = DiarizerConfig{});
  m.def("diarize", &diarize, py::arg("library"), py::arg("sequence"), py::arg("config") = DiarizerConfig{},
        py::arg("jobs") = 1);
  m.def("segment_dump", &segment_dump);

  py::class_<TuneCell>(m, "TuneCell")
      .def_readonly("score_thresh", &TuneCell::score_thresh)
      .def_readonly("sim_thresh", &TuneCell::sim_thresh)
      .def_readonly("mean_der", &TuneCell::mean_der)
      .def_readonly("std_der", &TuneCell::std_der);
  py::class_<TuneResult>(m, "TuneResult")
      .def_readonly("grid", &TuneResult::grid)
      .def_readonly("best", &TuneResult::best);
  m.def(
      "grid_search",
      [](const std::vector<std::pair<EmbeddingSequence, Annotation>>& dev, const ReferenceAudioLibrary& lib,
         std::vector<double> score_grid, std::vector<double> sim_grid, double collar, const DiarizerConfig& base,
         unsigned jobs) { return grid_search(to_cases(dev), lib, score_grid, sim_grid, collar, base, jobs); },
      py::arg("dev"), py::arg("library"), py::arg("score_grid") = kDefaultScoreGrid,
      py::arg("sim_grid") = kDefaultSimGrid, py::arg("collar") = 0.5, py::arg("base") = DiarizerConfig{},
      py::arg("jobs") = 1);

  // Corpus configs travel as the same JSON the CLI accepts.
  m.def(
      "gen_corpus",
      [](const std::string& config_json, unsigned jobs) {
        const auto cfg = corpus_config_from_json(config_json);
        const auto corpus = gen_corpus(cfg, jobs);
        py::dict splits;
        for (const auto& split : corpus.splits) {
          py::list cases;
          for (const auto& rc : split.cases) cases.append(py::make_tuple(rc.embeddings, rc.annotation));
          splits[py::str(split.name)] = cases;
        }
        py::dict out;
        out["referenced"] = corpus.referenced;
        out["splits"] = splits;
        return out;
      },
      py::arg("config_json") = "{}", py::arg("jobs") = 1);
  m.def(
      "write_corpus",
      [](const std::string& config_json, const std::string& out_dir, unsigned jobs) {
        const auto cfg = corpus_config_from_json(config_json);
        write_corpus(gen_corpus(cfg, jobs), cfg, out_dir);
      },
      py::arg("config_json"), py::arg("out_dir"), py::arg("jobs") = 1);
}
