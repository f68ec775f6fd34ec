#ifndef ITTS_PIPELINE_HPP
#define ITTS_PIPELINE_HPP

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "itts/acoustic.hpp"
#include "itts/frontend.hpp"
#include "itts/policy.hpp"
#include "itts/vocoder.hpp"

namespace itts {

enum class RunMode { full, incremental, shadow };
enum class PlaybackMode { simulated, wall_clock };

// Where per-unit synthesis durations come from. The modeled clock charges
// fixed per-frame costs, so timelines and reports are bit-reproducible; the
// measured clock uses actual wall time per stage. Audio bytes are identical
// either way.
enum class TimingModel { modeled, measured };

struct SessionConfig {
  LookaheadPolicy policy;
  bool full_sentence_policy = false;  // g(t) = h(t) = m
  int64_t delta = 15;                 // overlap frames per side at vocode time
  int64_t min_chunk_phonemes = 6;     // l
  uint64_t seed = 42;
  RunMode mode = RunMode::incremental;
  PlaybackMode playback = PlaybackMode::simulated;
  TimingModel timing = TimingModel::modeled;
  // Modeled clock constants, seconds.
  double cost_spec_per_frame = 0.001;
  double cost_voc_per_frame = 0.0004;
  double cost_per_task = 0.002;
  size_t queue_capacity = 4;
};

// One chunk of input revealed at a point in time (shadow mode: the source
// audio chunk's end time).
struct InputEvent {
  Chunk chunk;
  double arrival_time = 0.0;
};

struct UnitTiming {
  int64_t unit = 0;  // 1-based
  double input_available = 0.0;
  double syn_start = 0.0;
  double syn_finish = 0.0;
  double play_start = 0.0;
  double play_end = 0.0;
  double audio_duration = 0.0;
};

struct SynthesisTimeline {
  std::vector<UnitTiming> units;

  // CSV with header unit,input_available,syn_start,syn_finish,play_start,
  // play_end,audio_duration.
  void write_csv(std::ostream& os) const;
};

struct SessionResult {
  std::vector<WaveSegment> segments;  // per unit, in order
  std::vector<double> waveform;       // concatenation of the segments
  SynthesisTimeline timeline;
  std::vector<WordSpectrogram> spectrograms;  // per unit, in order
  std::vector<int64_t> unit_frame_counts;
  std::vector<int64_t> unit_first_frames;
  std::vector<RenderedPhoneme> rendered;  // realized phoneme durations
  int64_t total_phonemes = 0;
  int64_t chunk_count = 0;
  // Backend diagnostic: false if the attention argmax ever moved backwards.
  bool attention_monotone = true;
};

// Binds the frontend lexicon and the two reference backends into a runnable
// engine. Immutable after construction; runs are independent and may execute
// concurrently on distinct configs.
class Engine {
 public:
  Engine(Lexicon lexicon, ReferenceAcousticConfig acoustic_cfg,
         VocoderConfig vocoder_cfg);

  // normalize -> segment -> phonemize -> chunk.
  std::vector<Chunk> prepare_chunks(const std::string& text, int64_t l) const;

  // All input consumed before any synthesis; one logical timeline unit.
  SessionResult run_full_sentence(const std::string& text,
                                  const SessionConfig& cfg) const;

  // All text available at time zero, synthesis gated by the policy; playback
  // of unit t overlaps synthesis of unit t+1.
  SessionResult run_incremental(const std::string& text,
                                const SessionConfig& cfg) const;

  // Input chunks arrive on a schedule; synthesis of a unit cannot start
  // before the chunks the policy requires have arrived.
  SessionResult run_shadow(const std::vector<InputEvent>& events,
                           const SessionConfig& cfg) const;

  // Every chunk synthesized in isolation: no previous context, no lookahead,
  // no vocoder overlap.
  SessionResult run_independent(const std::string& text,
                                const SessionConfig& cfg) const;

  const Lexicon& lexicon() const { return lexicon_; }
  const VocoderBackend& vocoder() const { return vocoder_; }
  const ReferenceAcousticConfig& acoustic_config() const { return acoustic_cfg_; }

 private:
  struct Decoded;
  enum class WindowPolicy { overlap, monolith, isolated };

  Decoded decode(const std::vector<Chunk>& chunks, const SessionConfig& cfg) const;
  Decoded decode_independent(const std::vector<Chunk>& chunks) const;
  SessionResult assemble(Decoded decoded, const std::vector<double>& arrivals,
                         const SessionConfig& cfg, WindowPolicy window_policy) const;

  Lexicon lexicon_;
  ReferenceAcousticConfig acoustic_cfg_;
  ReferenceVocoder vocoder_;
};

}  // namespace itts

#endif  // ITTS_PIPELINE_HPP
