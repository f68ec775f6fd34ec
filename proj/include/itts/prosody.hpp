#ifndef ITTS_PROSODY_HPP
#define ITTS_PROSODY_HPP

#include <span>
#include <string>
#include <vector>

#include "itts/acoustic.hpp"

namespace itts {

struct AlignedPhoneme {
  std::string symbol;
  double start = 0.0;  // seconds
  double end = 0.0;
};

// Non-overlapping, ordered, end > start.
using PhonemeAlignment = std::vector<AlignedPhoneme>;

// Exact alignment from the acoustic model's realized frame counts.
PhonemeAlignment alignment_from_rendered(std::span<const RenderedPhoneme> rendered,
                                         int gamma, int sample_rate);

struct PitchPoint {
  bool voiced = false;
  double f0_hz = 0.0;  // 50..500 when voiced
};

// Either a uniform-hop track (hop_seconds > 0) or an aligned sequence of
// sample points (hop_seconds == 0), one per phoneme.
struct PitchTrack {
  std::vector<PitchPoint> points;
  double hop_seconds = 0.0;
};

// Normalized-autocorrelation pitch of one analysis window. The window must
// hold at least twice the longest candidate lag (50 Hz). Unvoiced when the
// peak correlation falls below 0.5 or the window is near-silent.
PitchPoint estimate_f0(std::span<const double> window, int sample_rate);

// 40 ms windows at a 10 ms hop.
PitchTrack track_pitch(std::span<const double> waveform, int sample_rate);

// One pitch point per requested center time, window clipped to the waveform.
PitchTrack pitch_at_times(std::span<const double> waveform, int sample_rate,
                          std::span<const double> centers_seconds);

// Per-phoneme midpoint pitch; the time-aligned representation used to compare
// renditions whose total lengths differ.
PitchTrack pitch_at_alignment(std::span<const double> waveform, int sample_rate,
                              const PhonemeAlignment& alignment);

// RMSE over per-phoneme durations, in milliseconds. The two alignments must
// carry the same phoneme symbol sequence.
double duration_rmse_ms(const PhonemeAlignment& a, const PhonemeAlignment& b);

// RMSE over jointly-voiced points, in Hz. Tracks must have equal length;
// throws EmptyComparison when no point is voiced on both sides.
double pitch_rmse_hz(const PitchTrack& a, const PitchTrack& b);

}  // namespace itts

#endif  // ITTS_PROSODY_HPP
