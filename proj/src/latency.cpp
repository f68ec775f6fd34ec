#include "itts/latency.hpp"

#include <algorithm>

#include "itts/errors.hpp"

namespace itts {

std::vector<double> time_balance(std::span<const double> audio_durations,
                                 std::span<const double> synth_durations) {
  if (audio_durations.size() != synth_durations.size()) {
    throw DomainError("time_balance: series length mismatch");
  }
  const size_t m = audio_durations.size();
  std::vector<double> tb(m);
  double prev = 0.0;
  for (size_t t = 0; t < m; ++t) {
    const double next_synth = (t + 1 < m) ? synth_durations[t + 1] : 0.0;
    prev = std::max(prev, 0.0) + (audio_durations[t] - next_synth);
    tb[t] = prev;
  }
  return tb;
}

double avg_chunk_lag(const SynthesisTimeline& timeline) {
  if (timeline.units.empty()) {
    throw DomainError("avg_chunk_lag: empty timeline");
  }
  double sum = 0.0;
  for (const UnitTiming& u : timeline.units) {
    if (!(u.input_available >= 0.0)) {
      throw DomainError("avg_chunk_lag: missing input arrival time");
    }
    sum += u.play_end - u.input_available;
  }
  return sum / static_cast<double>(timeline.units.size());
}

double first_audio_latency(const SynthesisTimeline& timeline) {
  if (timeline.units.empty()) {
    throw DomainError("first_audio_latency: empty timeline");
  }
  return timeline.units.front().play_start;
}

double real_time_factor(const SynthesisTimeline& timeline) {
  double audio = 0.0, synth = 0.0;
  for (const UnitTiming& u : timeline.units) {
    audio += u.audio_duration;
    synth += u.syn_finish - u.syn_start;
  }
  if (synth <= 0.0) {
    throw DomainError("real_time_factor: zero synthesis time");
  }
  return audio / synth;
}

LatencyReport make_latency_report(const SynthesisTimeline& timeline) {
  LatencyReport report;
  std::vector<double> audio, synth;
  for (const UnitTiming& u : timeline.units) {
    audio.push_back(u.audio_duration);
    synth.push_back(u.syn_finish - u.syn_start);
  }
  report.tb_series = time_balance(audio, synth);
  report.avg_chunk_lag = avg_chunk_lag(timeline);
  report.first_audio_latency = first_audio_latency(timeline);
  report.rtf = real_time_factor(timeline);
  report.continuous =
      std::all_of(report.tb_series.begin(), report.tb_series.end(),
                  [](double tb) { return tb >= 0.0; });
  return report;
}

}  // namespace itts
