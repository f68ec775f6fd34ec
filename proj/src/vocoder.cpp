#include "itts/vocoder.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "itts/errors.hpp"

namespace itts {

void VocoderConfig::validate() const {
  if (gamma != 256 && gamma != 300) {
    throw DomainError("vocoder config: gamma must be 256 or 300");
  }
  if (receptive_radius < 0) {
    throw DomainError("vocoder config: receptive_radius must be >= 0");
  }
  if (sample_rate <= 0) {
    throw DomainError("vocoder config: sample_rate must be positive");
  }
}

NoiseVector sample_noise(uint64_t seed, int64_t frame_capacity, int gamma) {
  if (frame_capacity <= 0) {
    throw DomainError("sample_noise: frame_capacity must be positive");
  }
  if (gamma <= 0) throw DomainError("sample_noise: gamma must be positive");
  NoiseVector noise;
  noise.seed = seed;
  noise.samples.resize(static_cast<size_t>(frame_capacity) * gamma);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (double& s : noise.samples) s = gauss(rng);
  return noise;
}

ReferenceVocoder::ReferenceVocoder(VocoderConfig cfg) : cfg_(cfg) {
  cfg_.validate();
}

double ReferenceVocoder::band_frequency_hz(int band) {
  // 80 bands map linearly onto 100..400 Hz, well inside the trackable range.
  return 100.0 + 300.0 * band / (kMelBands - 1);
}

double ReferenceVocoder::frame_energy(const MelFrame& frame) {
  double sum = 0.0;
  for (float b : frame) sum += b;
  return sum / kMelBands;
}

double ReferenceVocoder::frame_pitch_hz(const MelFrame& frame) {
  double num = 0.0, den = 0.0;
  for (int i = 0; i < kMelBands; ++i) {
    num += frame[i] * band_frequency_hz(i);
    den += frame[i];
  }
  return den > 0.0 ? num / den : 0.0;
}

void ReferenceVocoder::render(std::span<const MelFrame> frames,
                              int64_t window_first, int64_t out_first,
                              int64_t out_count, std::span<const double> noise,
                              std::span<double> out) const {
  const int gamma = cfg_.gamma;
  const int radius = cfg_.receptive_radius;
  const int64_t out_samples = out_count * gamma;
  if (static_cast<int64_t>(noise.size()) != out_samples ||
      static_cast<int64_t>(out.size()) != out_samples) {
    throw DomainError("render: output/noise span size mismatch");
  }
  if (out_first < window_first ||
      out_first + out_count > window_first + static_cast<int64_t>(frames.size())) {
    throw DomainError("render: output range not covered by the window");
  }

  // Per-frame scalars for the window.
  std::vector<double> energy(frames.size()), pitch(frames.size());
  for (size_t j = 0; j < frames.size(); ++j) {
    energy[j] = frame_energy(frames[j]);
    pitch[j] = frame_pitch_hz(frames[j]);
  }

  const double inv_rate = 1.0 / cfg_.sample_rate;
  const double two_pi = 2.0 * std::numbers::pi;
  const int64_t window_last = window_first + static_cast<int64_t>(frames.size());

  // Kernel at continuous frame distance x: triangle over the radius times a
  // per-frame decay of 3, so the frame nearest a missing neighbour always
  // carries more weight than the whole tail behind it.
  std::vector<double> decay(static_cast<size_t>(radius) + 1);
  for (int d = 0; d <= radius; ++d) decay[static_cast<size_t>(d)] = std::pow(3.0, -d);
  const double ln3 = std::log(3.0);

  for (int64_t s = 0; s < out_samples; ++s) {
    const int64_t n = out_first * gamma + s;  // utterance sample index
    const int64_t f = n / gamma;              // utterance frame index
    const double frac = (static_cast<double>(n % gamma) + 0.5) / gamma;
    const double frac_decay = std::exp(-frac * ln3);

    // Normalizer over the full virtual grid so the kernel is a pure function
    // of n; frames that are actually absent just contribute nothing.
    double norm = 0.0;
    for (int d = 0; d <= radius; ++d) {
      norm += (1.0 - (d + frac) / (radius + 1)) * decay[static_cast<size_t>(d)];
    }
    norm *= frac_decay;

    double acc = 0.0;
    for (int d = 0; d <= radius; ++d) {
      const int64_t j = f - d;  // causal: only current and past frames
      if (j < window_first || j >= window_last) continue;
      const size_t idx = static_cast<size_t>(j - window_first);
      if (energy[idx] == 0.0) continue;
      const double weight = (1.0 - (d + frac) / (radius + 1)) *
                            decay[static_cast<size_t>(d)] * frac_decay / norm;
      acc += weight * energy[idx] * std::sin(two_pi * pitch[idx] * n * inv_rate);
    }
    const size_t own = static_cast<size_t>(f - window_first);
    acc += kNoiseGain * energy[own] * noise[static_cast<size_t>(s)];
    out[static_cast<size_t>(s)] = acc;
  }
}

std::vector<double> synthesize_full(std::span<const MelFrame> frames,
                                    const NoiseVector& noise,
                                    const VocoderBackend& backend) {
  const int gamma = backend.config().gamma;
  const int64_t total = static_cast<int64_t>(frames.size());
  if (static_cast<int64_t>(noise.samples.size()) < total * gamma) {
    throw NoiseExhausted("synthesize_full: noise vector shorter than " +
                         std::to_string(total * gamma) + " samples");
  }
  std::vector<double> out(static_cast<size_t>(total) * gamma);
  backend.render(frames, 0, 0, total,
                 std::span<const double>(noise.samples.data(),
                                         static_cast<size_t>(total) * gamma),
                 out);
  return out;
}

WaveSegment synthesize_overlap(const FrameWindow& window, const NoiseSlice& z,
                               int64_t unit_index, int64_t delta,
                               const VocoderBackend& backend) {
  if (delta < 0) throw DomainError("synthesize_overlap: delta must be >= 0");
  const int gamma = backend.config().gamma;
  const int64_t window_frames = static_cast<int64_t>(window.frames.size());
  const int64_t window_last = window.first_frame + window_frames;
  if (window.unit_first < window.first_frame ||
      window.unit_first + window.unit_count > window_last ||
      window.unit_count <= 0) {
    throw DomainError("synthesize_overlap: unit span not inside the window");
  }
  if (z.first_sample != window.first_frame * gamma ||
      static_cast<int64_t>(z.samples.size()) != window_frames * gamma) {
    throw AlignmentError("synthesize_overlap: noise slice not aligned to window");
  }

  // Cap the context at delta frames on each side of the unit.
  const int64_t left = std::min<int64_t>(delta, window.unit_first - window.first_frame);
  const int64_t unit_end = window.unit_first + window.unit_count;
  const int64_t right = std::min<int64_t>(delta, window_last - unit_end);
  const int64_t voc_first = window.unit_first - left;
  const int64_t voc_count = left + window.unit_count + right;

  std::span<const MelFrame> voc_frames(
      window.frames.data() + (voc_first - window.first_frame),
      static_cast<size_t>(voc_count));
  std::span<const double> unit_noise =
      z.samples.subspan(static_cast<size_t>((window.unit_first - window.first_frame) * gamma),
                        static_cast<size_t>(window.unit_count * gamma));

  WaveSegment seg;
  seg.unit_index = unit_index;
  seg.first_frame = window.unit_first;
  seg.frame_count = window.unit_count;
  seg.samples.resize(static_cast<size_t>(window.unit_count * gamma));
  // Emitting only the unit's own samples is the trim: every sample is an
  // independent function of the window, so vocode-then-cut and cut-while-
  // vocoding coincide exactly.
  backend.render(voc_frames, voc_first, window.unit_first, window.unit_count,
                 unit_noise, seg.samples);
  return seg;
}

}  // namespace itts
