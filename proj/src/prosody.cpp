#include "itts/prosody.hpp"

#include <algorithm>
#include <cmath>

#include "itts/errors.hpp"

namespace itts {

namespace {

constexpr double kMinF0 = 50.0;
constexpr double kMaxF0 = 500.0;
constexpr double kVoicingThreshold = 0.5;
constexpr double kSilenceRms = 1e-6;

}  // namespace

PhonemeAlignment alignment_from_rendered(
    std::span<const RenderedPhoneme> rendered, int gamma, int sample_rate) {
  PhonemeAlignment out;
  const double frame_seconds = static_cast<double>(gamma) / sample_rate;
  double t = 0.0;
  for (const RenderedPhoneme& p : rendered) {
    AlignedPhoneme a;
    a.symbol = p.symbol;
    a.start = t;
    t += p.frames * frame_seconds;
    a.end = t;
    out.push_back(std::move(a));
  }
  return out;
}

PitchPoint estimate_f0(std::span<const double> window, int sample_rate) {
  const int max_lag = static_cast<int>(sample_rate / kMinF0);
  const int min_lag = std::max(2, static_cast<int>(sample_rate / kMaxF0));
  const int n = static_cast<int>(window.size());
  if (n < 2 * max_lag) {
    throw DomainError("estimate_f0: window shorter than twice the longest lag");
  }

  double energy = 0.0;
  for (double x : window) energy += x * x;
  if (std::sqrt(energy / n) < kSilenceRms) return {false, 0.0};

  // Normalized autocorrelation over the candidate lag range.
  int best_lag = 0;
  double best_r = -1.0, r_best_prev = 0.0, r_best_next = 0.0;
  std::vector<double> r(static_cast<size_t>(max_lag) + 1, 0.0);
  for (int lag = min_lag - 1; lag <= max_lag; ++lag) {
    double dot = 0.0, e0 = 0.0, e1 = 0.0;
    const int span = n - lag;
    for (int i = 0; i < span; ++i) {
      dot += window[i] * window[i + lag];
      e0 += window[i] * window[i];
      e1 += window[i + lag] * window[i + lag];
    }
    const double denom = std::sqrt(e0 * e1);
    r[static_cast<size_t>(lag)] = denom > 0.0 ? dot / denom : 0.0;
  }
  double global_max = -1.0;
  for (int lag = min_lag; lag < max_lag; ++lag) {
    global_max = std::max(global_max, r[static_cast<size_t>(lag)]);
  }
  if (global_max < kVoicingThreshold) return {false, 0.0};
  // Pick the smallest strong local peak, not the global maximum: a periodic
  // signal correlates equally well at every multiple of its period.
  for (int lag = min_lag; lag < max_lag; ++lag) {
    const double cur = r[static_cast<size_t>(lag)];
    if (cur >= 0.9 * global_max && cur >= r[static_cast<size_t>(lag - 1)] &&
        cur >= r[static_cast<size_t>(lag + 1)]) {
      best_r = cur;
      best_lag = lag;
      r_best_prev = r[static_cast<size_t>(lag - 1)];
      r_best_next = r[static_cast<size_t>(lag + 1)];
      break;
    }
  }
  if (best_lag == 0) return {false, 0.0};

  // Parabolic refinement around the peak lag.
  double lag_refined = best_lag;
  const double denom = r_best_prev - 2.0 * best_r + r_best_next;
  if (denom < 0.0) {
    lag_refined += 0.5 * (r_best_prev - r_best_next) / denom;
  }
  double f0 = sample_rate / lag_refined;
  f0 = std::clamp(f0, kMinF0, kMaxF0);
  return {true, f0};
}

PitchTrack track_pitch(std::span<const double> waveform, int sample_rate) {
  PitchTrack track;
  track.hop_seconds = 0.010;
  const int win = static_cast<int>(sample_rate * 0.040);
  const int hop = static_cast<int>(sample_rate * 0.010);
  const int n = static_cast<int>(waveform.size());
  for (int start = 0; start + win <= n; start += hop) {
    track.points.push_back(
        estimate_f0(waveform.subspan(static_cast<size_t>(start),
                                     static_cast<size_t>(win)),
                    sample_rate));
  }
  return track;
}

PitchTrack pitch_at_times(std::span<const double> waveform, int sample_rate,
                          std::span<const double> centers_seconds) {
  PitchTrack track;
  track.hop_seconds = 0.0;
  const int min_win = 2 * static_cast<int>(sample_rate / kMinF0);
  const int win = std::max(static_cast<int>(sample_rate * 0.040), min_win);
  const int64_t n = static_cast<int64_t>(waveform.size());
  for (double center : centers_seconds) {
    int64_t start = static_cast<int64_t>(center * sample_rate) - win / 2;
    start = std::clamp<int64_t>(start, 0, std::max<int64_t>(0, n - win));
    if (n < win) {
      track.points.push_back({false, 0.0});
      continue;
    }
    track.points.push_back(
        estimate_f0(waveform.subspan(static_cast<size_t>(start),
                                     static_cast<size_t>(win)),
                    sample_rate));
  }
  return track;
}

PitchTrack pitch_at_alignment(std::span<const double> waveform, int sample_rate,
                              const PhonemeAlignment& alignment) {
  std::vector<double> centers;
  centers.reserve(alignment.size());
  for (const AlignedPhoneme& p : alignment) {
    centers.push_back(0.5 * (p.start + p.end));
  }
  return pitch_at_times(waveform, sample_rate, centers);
}

double duration_rmse_ms(const PhonemeAlignment& a, const PhonemeAlignment& b) {
  if (a.size() != b.size() || a.empty()) {
    throw AlignmentMismatch("duration_rmse: phoneme sequences differ in length");
  }
  double sum = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    if (a[i].symbol != b[i].symbol) {
      throw AlignmentMismatch("duration_rmse: symbol mismatch at index " +
                              std::to_string(i));
    }
    const double da = (a[i].end - a[i].start) * 1000.0;
    const double db = (b[i].end - b[i].start) * 1000.0;
    sum += (da - db) * (da - db);
  }
  return std::sqrt(sum / static_cast<double>(a.size()));
}

double pitch_rmse_hz(const PitchTrack& a, const PitchTrack& b) {
  if (a.points.size() != b.points.size()) {
    throw AlignmentMismatch("pitch_rmse: track lengths differ");
  }
  double sum = 0.0;
  size_t voiced = 0;
  for (size_t i = 0; i < a.points.size(); ++i) {
    if (!a.points[i].voiced || !b.points[i].voiced) continue;
    const double d = a.points[i].f0_hz - b.points[i].f0_hz;
    sum += d * d;
    ++voiced;
  }
  if (voiced == 0) throw EmptyComparison("pitch_rmse: no jointly-voiced points");
  return std::sqrt(sum / static_cast<double>(voiced));
}

}  // namespace itts
