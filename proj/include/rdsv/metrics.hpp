#pragma once

#include <span>
#include <vector>

#include "rdsv/rttm.hpp"

namespace rdsv {

struct DerReport {
  double total_ref = 0.0;  // seconds of scored reference speech
  double missed = 0.0;
  double false_alarm = 0.0;
  double confusion = 0.0;
  double der = 0.0;
};

struct CaseDuration {
  double audio_s = 0.0;
  double speech_s = 0.0;
};

struct AggregateReport {
  double mean_der = 0.0;
  double std_der = 0.0;  // population
  double max_der = 0.0;
  std::size_t case_count = 0;
  double mean_audio_minutes = 0.0;
  double mean_speech_minutes = 0.0;
};

// Diarization error rate by exact interval sweep. `collar` is the total
// forgiveness collar: collar/2 is removed on each side of every reference
// boundary. Labels are compared by identity (no speaker mapping); each
// reference speaker's time counts separately where references overlap.
DerReport der(const Annotation& reference, const Annotation& hypothesis, double collar);

// Brute-force check of der(): samples frame midpoints every `frame` seconds.
DerReport frame_oracle_der(const Annotation& reference, const Annotation& hypothesis, double collar, double frame);

// `durations` may be empty or must match `reports` in length.
AggregateReport aggregate(std::span<const DerReport> reports, std::span<const CaseDuration> durations = {});

}  // namespace rdsv
