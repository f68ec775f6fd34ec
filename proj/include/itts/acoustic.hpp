#ifndef ITTS_ACOUSTIC_HPP
#define ITTS_ACOUSTIC_HPP

#include <array>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "itts/frontend.hpp"

namespace itts {

inline constexpr int kMelBands = 80;

// One 80-band acoustic frame.
using MelFrame = std::array<float, kMelBands>;

// Frames belonging to one synthesis unit.
struct WordSpectrogram {
  std::vector<MelFrame> frames;
  int64_t unit_index = 0;  // 1-based
};

// Alignment distribution over the phonemes fed so far (plus the end marker,
// once fed). Entries are >= 0 and sum to 1.
struct AttentionVector {
  std::vector<float> weights;

  // 0-based index of the peak; ties break toward the lowest index so a
  // boundary is never declared early.
  size_t argmax() const;
};

struct PhonemeTemplate {
  int duration = 0;  // base frame count, 5..12 in the shipped table
  MelFrame bands{};
};

// Template spectra and base durations keyed by phoneme symbol.
//
// File format (UTF-8, one entry per line):
//   PHONEME<TAB>duration<TAB>80 space-separated floats
class PhonemeTable {
 public:
  // Deterministic table derived from a seeded hash of each symbol; covers
  // the full phoneme inventory used by the shipped lexicon. The repository
  // ships this exact table as a data file.
  static PhonemeTable builtin(uint64_t seed = 7);

  static PhonemeTable load(const std::string& path);
  void save(const std::string& path) const;

  void insert(const std::string& symbol, PhonemeTemplate tmpl);
  const PhonemeTemplate* find(const std::string& symbol) const;
  const PhonemeTemplate& at(const std::string& symbol) const;  // UnknownSymbol on miss

  size_t size() const { return map_.size(); }
  bool operator==(const PhonemeTable& other) const { return map_ == other.map_; }

 private:
  std::map<std::string, PhonemeTemplate> map_;
};

bool operator==(const PhonemeTemplate& a, const PhonemeTemplate& b);

struct ReferenceAcousticConfig {
  PhonemeTable table;
  // Cross-fade length C into the next phoneme's template; strictly less than
  // the minimum base duration so one unit of lookahead determines every frame.
  int crossfade_frames = 3;
  // Frames appended to a phoneme whose continuation is unknown when its
  // pure-template run ends (the pre-pause hold that makes missing lookahead
  // audible and measurable).
  int hold_frames = 2;
};

struct StepOutput {
  MelFrame frame{};
  AttentionVector attention;
  double stop_prob = 0.0;
};

// Incremental text-to-spectrogram contract. A stream is single-owner: one
// caller at a time, transferable between calls. Distinct streams are fully
// independent.
class AcousticStream {
 public:
  virtual ~AcousticStream() = default;

  // Appends chunks in order. Throws SessionClosed after feed_eos.
  virtual void extend_input(std::span<const Chunk> chunks) = 0;

  // Marks the input as complete; the decoder may now run to its stop.
  virtual void feed_eos() = 0;

  // Emits the next frame conditioned only on fed input and prior frames.
  virtual StepOutput step_frame() = 0;

  // True when every fed phoneme has been rendered and neither more input nor
  // the end marker has arrived; stepping in that state throws.
  virtual bool needs_input() const = 0;

  virtual int64_t fed_units() const = 0;
  virtual bool eos_fed() const = 0;

  // Running phoneme totals per fed unit (end marker excluded).
  virtual const std::vector<int64_t>& cumulative_phonemes() const = 0;
};

// Actual frame count of one rendered phoneme, recorded as rendering finishes.
struct RenderedPhoneme {
  std::string symbol;
  int64_t unit = 0;  // 1-based
  int frames = 0;
};

// Deterministic stand-in for a neural acoustic model.
//
// Each phoneme renders duration(p) - C pure template frames, then decides:
//   - next phoneme already fed  -> C frames cross-fading into its template;
//   - no next phoneme, eos fed  -> C frames fading to silence;
//   - continuation unknown      -> hold_frames extra pure frames, then C
//                                  frames fading to silence, lengthening the
//                                  phoneme.
// Attention is one-hot on the phoneme being rendered. After all fed phonemes
// are exhausted and eos has been fed, one final step emits a silence frame
// with attention on the end-marker slot and stop probability 1; that frame
// belongs to no unit.
class ReferenceAcousticModel final : public AcousticStream {
 public:
  explicit ReferenceAcousticModel(ReferenceAcousticConfig cfg);
  ~ReferenceAcousticModel() override;

  void extend_input(std::span<const Chunk> chunks) override;
  void feed_eos() override;
  StepOutput step_frame() override;
  bool needs_input() const override;
  int64_t fed_units() const override;
  bool eos_fed() const override;
  const std::vector<int64_t>& cumulative_phonemes() const override;

  bool stopped() const;

  // Completed phonemes with their realized frame counts, in render order.
  const std::vector<RenderedPhoneme>& rendered() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// Returns the highest unit index u > last_completed whose cumulative phoneme
// count lies strictly below the (1-based) attention argmax position, i.e.
// the decoder has moved past unit u. nullopt while attention stays within
// already-credited units.
std::optional<int64_t> detect_boundary(
    const std::vector<int64_t>& cumulative_phonemes, int64_t last_completed,
    const AttentionVector& attention);

// Strictly greater than 0.5.
bool is_stopped(double stop_prob);

}  // namespace itts

#endif  // ITTS_ACOUSTIC_HPP
