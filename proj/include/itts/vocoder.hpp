#ifndef ITTS_VOCODER_HPP
#define ITTS_VOCODER_HPP

#include <cstdint>
#include <span>
#include <vector>

#include "itts/acoustic.hpp"

namespace itts {

struct VocoderConfig {
  int gamma = 300;           // waveform samples per spectrogram frame
  int receptive_radius = 8;  // R, in frames
  int sample_rate = 24000;   // Hz

  void validate() const;  // gamma in {256, 300}, R >= 0
};

// Fixed random signal shared by every window of one utterance.
struct NoiseVector {
  std::vector<double> samples;
  uint64_t seed = 0;
};

// Standard-normal noise of length gamma * frame_capacity, deterministic in
// the seed.
NoiseVector sample_noise(uint64_t seed, int64_t frame_capacity, int gamma);

// Audio of one synthesis unit, in utterance coordinates.
struct WaveSegment {
  std::vector<double> samples;
  int64_t unit_index = 0;   // 1-based
  int64_t first_frame = 0;  // frame span start
  int64_t frame_count = 0;  // frame span length
};

// Spectrogram-to-wave contract. Sample n of the utterance may depend only on
// frames within receptive_radius of frame n/gamma, on the noise sample z[n],
// and on n itself. Backends are immutable after construction; render calls
// are pure and may run concurrently.
class VocoderBackend {
 public:
  virtual ~VocoderBackend() = default;

  // Renders samples for frames [out_first, out_first + out_count) given the
  // window [window_first, window_first + frames.size()). Frames outside the
  // window contribute nothing. All frame indices are utterance coordinates;
  // noise is aligned to the output samples and must hold
  // out_count * gamma values. out must hold the same count.
  virtual void render(std::span<const MelFrame> frames, int64_t window_first,
                      int64_t out_first, int64_t out_count,
                      std::span<const double> noise,
                      std::span<double> out) const = 0;

  virtual const VocoderConfig& config() const = 0;
};

// Deterministic stand-in for a neural vocoder. Each output sample mixes
// sinusoids of the nearby frames' band-weighted pitches, weighted by a
// normalized triangular kernel over the past receptive_radius frames, scaled
// by frame energy, plus a small energy-gated noise term. Linear in frame
// energies and in the noise; strictly local; causal.
class ReferenceVocoder final : public VocoderBackend {
 public:
  explicit ReferenceVocoder(VocoderConfig cfg);

  void render(std::span<const MelFrame> frames, int64_t window_first,
              int64_t out_first, int64_t out_count,
              std::span<const double> noise,
              std::span<double> out) const override;

  const VocoderConfig& config() const override { return cfg_; }

  static constexpr double kNoiseGain = 0.01;

  // Mean band energy and energy-weighted mean of the band frequencies.
  static double frame_energy(const MelFrame& frame);
  static double frame_pitch_hz(const MelFrame& frame);
  static double band_frequency_hz(int band);

 private:
  VocoderConfig cfg_;
};

// Whole-utterance synthesis. noise must hold at least gamma * frames.size()
// samples, else NoiseExhausted.
std::vector<double> synthesize_full(std::span<const MelFrame> frames,
                                    const NoiseVector& noise,
                                    const VocoderBackend& backend);

// Frames of units t-1 .. h(t) around unit t, with the unit's own span marked.
struct FrameWindow {
  std::vector<MelFrame> frames;
  int64_t first_frame = 0;  // utterance frame index of frames[0]
  int64_t unit_first = 0;   // where unit t begins
  int64_t unit_count = 0;   // frames of unit t
};

// Noise slice aligned to a frame window, in utterance sample coordinates.
struct NoiseSlice {
  std::span<const double> samples;
  int64_t first_sample = 0;
};

// Vocodes unit t with at most delta trailing frames of unit t-1 in front and
// at most delta frames of following units behind, then keeps only the unit's
// own samples. The noise slice must align exactly with the window
// (first_sample == first_frame * gamma, matching length), else AlignmentError.
WaveSegment synthesize_overlap(const FrameWindow& window, const NoiseSlice& z,
                               int64_t unit_index, int64_t delta,
                               const VocoderBackend& backend);

}  // namespace itts

#endif  // ITTS_VOCODER_HPP
