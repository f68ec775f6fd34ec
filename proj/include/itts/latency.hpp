#ifndef ITTS_LATENCY_HPP
#define ITTS_LATENCY_HPP

#include <span>
#include <vector>

#include "itts/pipeline.hpp"

namespace itts {

struct LatencyReport {
  std::vector<double> tb_series;
  double avg_chunk_lag = 0.0;
  double first_audio_latency = 0.0;
  double rtf = 0.0;
  bool continuous = true;  // every time-balance entry >= 0
};

// TB(t) = max{TB(t-1), 0} + (a_t - s_{t+1}) with TB(0) = 0 and s_{m+1} = 0.
// a holds per-unit audio durations, s per-unit synthesis durations; both of
// length m.
std::vector<double> time_balance(std::span<const double> audio_durations,
                                 std::span<const double> synth_durations);

// Mean over units of play_end - input_available.
double avg_chunk_lag(const SynthesisTimeline& timeline);

// play_start of the first unit, counted from session start (time zero).
double first_audio_latency(const SynthesisTimeline& timeline);

// Total audio duration divided by total synthesis time.
double real_time_factor(const SynthesisTimeline& timeline);

LatencyReport make_latency_report(const SynthesisTimeline& timeline);

}  // namespace itts

#endif  // ITTS_LATENCY_HPP
