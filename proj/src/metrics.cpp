#include "rdsv/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "rdsv/error.hpp"

namespace rdsv {

namespace {

void check_inputs(const Annotation& reference, const Annotation& hypothesis, double collar) {
  if (reference.file_id != hypothesis.file_id)
    fail(Errc::file_id_mismatch,
         "reference '" + reference.file_id + "' scored against hypothesis '" + hypothesis.file_id + "'");
  if (!(collar >= 0.0)) fail(Errc::config, "collar must be non-negative");
}

struct Tally {
  double total_ref = 0.0, missed = 0.0, false_alarm = 0.0, confusion = 0.0;

  void add(std::size_t n_ref, std::size_t n_hyp, std::size_t n_correct, double dt) {
    total_ref += static_cast<double>(n_ref) * dt;
    if (n_ref > n_hyp) missed += static_cast<double>(n_ref - n_hyp) * dt;
    if (n_hyp > n_ref) false_alarm += static_cast<double>(n_hyp - n_ref) * dt;
    confusion += static_cast<double>(std::min(n_ref, n_hyp) - n_correct) * dt;
  }

  DerReport finish(const Annotation& reference) const {
    if (!(total_ref > 0.0)) fail(Errc::undefined_der, "no scored reference speech in '" + reference.file_id + "'");
    return {total_ref, missed, false_alarm, confusion, (missed + false_alarm + confusion) / total_ref};
  }
};

enum class Track { reference, hypothesis, collar };

struct Event {
  double time;
  Track track;
  int delta;
  const std::string* speaker;
};

}  // namespace

DerReport der(const Annotation& reference, const Annotation& hypothesis, double collar) {
  check_inputs(reference, hypothesis, collar);
  const double half = collar / 2.0;

  std::vector<Event> events;
  for (const auto& s : reference.segments) {
    events.push_back({s.onset, Track::reference, +1, &s.speaker});
    events.push_back({s.end(), Track::reference, -1, &s.speaker});
    if (half > 0.0) {
      for (double b : {s.onset, s.end()}) {
        events.push_back({b - half, Track::collar, +1, nullptr});
        events.push_back({b + half, Track::collar, -1, nullptr});
      }
    }
  }
  for (const auto& s : hypothesis.segments) {
    events.push_back({s.onset, Track::hypothesis, +1, &s.speaker});
    events.push_back({s.end(), Track::hypothesis, -1, &s.speaker});
  }
  std::sort(events.begin(), events.end(), [](const Event& a, const Event& b) { return a.time < b.time; });

  std::map<std::string, int> ref_active;
  std::map<std::string, int> hyp_active;
  int collar_depth = 0;
  Tally tally;
  for (std::size_t i = 0; i < events.size();) {
    const double t = events[i].time;
    for (; i < events.size() && events[i].time == t; ++i) {
      const auto& e = events[i];
      switch (e.track) {
        case Track::reference:
          if ((ref_active[*e.speaker] += e.delta) == 0) ref_active.erase(*e.speaker);
          break;
        case Track::hypothesis:
          if ((hyp_active[*e.speaker] += e.delta) == 0) hyp_active.erase(*e.speaker);
          break;
        case Track::collar:
          collar_depth += e.delta;
          break;
      }
    }
    if (i == events.size()) break;
    const double dt = events[i].time - t;
    if (collar_depth > 0 || dt <= 0.0) continue;
    std::size_t correct = 0;
    for (const auto& [speaker, n] : ref_active)
      if (hyp_active.contains(speaker)) ++correct;
    tally.add(ref_active.size(), hyp_active.size(), correct, dt);
  }
  return tally.finish(reference);
}

DerReport frame_oracle_der(const Annotation& reference, const Annotation& hypothesis, double collar, double frame) {
  check_inputs(reference, hypothesis, collar);
  if (!(frame > 0.0 && frame <= 0.01)) fail(Errc::config, "oracle frame must lie in (0, 0.01] s");
  const double half = collar / 2.0;
  const double horizon = std::max(reference.extent(), hypothesis.extent()) + collar + frame;
  const auto n_frames = static_cast<std::size_t>(std::ceil(horizon / frame));

  std::vector<double> boundaries;
  for (const auto& s : reference.segments) {
    boundaries.push_back(s.onset);
    boundaries.push_back(s.end());
  }

  Tally tally;
  for (std::size_t k = 0; k < n_frames; ++k) {
    const double t = (static_cast<double>(k) + 0.5) * frame;
    bool excluded = false;
    for (double b : boundaries) {
      if (std::abs(t - b) < half) {
        excluded = true;
        break;
      }
    }
    if (excluded) continue;
    std::set<std::string> ref_here, hyp_here;
    for (const auto& s : reference.segments)
      if (s.onset <= t && t < s.end()) ref_here.insert(s.speaker);
    for (const auto& s : hypothesis.segments)
      if (s.onset <= t && t < s.end()) hyp_here.insert(s.speaker);
    std::size_t correct = 0;
    for (const auto& s : ref_here) correct += hyp_here.count(s);
    tally.add(ref_here.size(), hyp_here.size(), correct, frame);
  }
  return tally.finish(reference);
}

AggregateReport aggregate(std::span<const DerReport> reports, std::span<const CaseDuration> durations) {
  if (reports.empty()) fail(Errc::config, "cannot aggregate an empty report list");
  if (!durations.empty() && durations.size() != reports.size())
    fail(Errc::config, "duration list does not match report list");
  AggregateReport agg;
  agg.case_count = reports.size();
  const auto n = static_cast<double>(reports.size());
  double sum = 0.0;
  agg.max_der = reports.front().der;
  for (const auto& r : reports) {
    sum += r.der;
    agg.max_der = std::max(agg.max_der, r.der);
  }
  agg.mean_der = sum / n;
  double var = 0.0;
  for (const auto& r : reports) var += (r.der - agg.mean_der) * (r.der - agg.mean_der);
  agg.std_der = std::sqrt(var / n);
  for (const auto& d : durations) {
    agg.mean_audio_minutes += d.audio_s / 60.0 / n;
    agg.mean_speech_minutes += d.speech_s / 60.0 / n;
  }
  return agg;
}

}  // namespace rdsv
