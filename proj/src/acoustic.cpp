#include "itts/acoustic.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "itts/errors.hpp"

namespace itts {

size_t AttentionVector::argmax() const {
  size_t best = 0;
  for (size_t i = 1; i < weights.size(); ++i) {
    if (weights[i] > weights[best]) best = i;
  }
  return best;
}

bool operator==(const PhonemeTemplate& a, const PhonemeTemplate& b) {
  return a.duration == b.duration && a.bands == b.bands;
}

namespace {

// splitmix64; stable across platforms, used only to derive the builtin table.
uint64_t mix64(uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

uint64_t hash_symbol(const std::string& symbol, uint64_t seed) {
  uint64_t h = seed ^ 0xCBF29CE484222325ull;
  for (unsigned char c : symbol) h = mix64(h ^ c);
  return h;
}

// 0..1 with 53-bit resolution.
double unit_double(uint64_t& state) {
  state = mix64(state);
  return static_cast<double>(state >> 11) * (1.0 / 9007199254740992.0);
}

const char* const kPhonemeInventory[] = {
    "AA", "AE", "AH", "AO", "AW", "AY", "B",  "CH", "D",  "DH",
    "EH", "ER", "EY", "F",  "G",  "HH", "IH", "IY", "JH", "K",
    "L",  "M",  "N",  "NG", "OW", "OY", "P",  "R",  "S",  "SH",
    "T",  "TH", "UH", "UW", "V",  "W",  "Y",  "Z",  "ZH"};

}  // namespace

PhonemeTable PhonemeTable::builtin(uint64_t seed) {
  PhonemeTable table;
  for (const char* symbol : kPhonemeInventory) {
    uint64_t state = hash_symbol(symbol, seed);
    PhonemeTemplate tmpl;
    tmpl.duration = 5 + static_cast<int>(mix64(state) % 8);  // 5..12
    // Band pattern: a small noise floor plus two or three formant-like bumps.
    int bumps = 2 + static_cast<int>(mix64(state ^ 0x5bd1e995) % 2);
    std::array<double, kMelBands> bands{};
    for (double& b : bands) b = 0.02 + 0.02 * unit_double(state);
    for (int k = 0; k < bumps; ++k) {
      double center = 4.0 + 71.0 * unit_double(state);
      double width = 2.0 + 4.0 * unit_double(state);
      double amp = 0.35 + 0.55 * unit_double(state);
      for (int i = 0; i < kMelBands; ++i) {
        double d = (i - center) / width;
        bands[i] += amp * std::exp(-0.5 * d * d);
      }
    }
    for (int i = 0; i < kMelBands; ++i) {
      tmpl.bands[i] = static_cast<float>(bands[i]);
    }
    table.insert(symbol, tmpl);
  }
  return table;
}

PhonemeTable PhonemeTable::load(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw DomainError("cannot open template table: " + path);
  PhonemeTable table;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    std::istringstream iss(line);
    PhonemeTemplate tmpl;
    std::string symbol;
    if (!(iss >> symbol >> tmpl.duration)) {
      throw DomainError("template table line " + std::to_string(lineno) +
                        ": bad symbol or duration");
    }
    if (tmpl.duration < 1) {
      throw DomainError("template table line " + std::to_string(lineno) +
                        ": duration must be >= 1");
    }
    for (int i = 0; i < kMelBands; ++i) {
      if (!(iss >> tmpl.bands[i]) || !std::isfinite(tmpl.bands[i])) {
        throw DomainError("template table line " + std::to_string(lineno) +
                          ": expected 80 finite band values");
      }
    }
    table.insert(symbol, tmpl);
  }
  if (table.size() == 0) throw DomainError("template table is empty: " + path);
  return table;
}

void PhonemeTable::save(const std::string& path) const {
  std::ofstream os(path);
  if (!os) throw DomainError("cannot write template table: " + path);
  for (const auto& [symbol, tmpl] : map_) {
    os << symbol << '\t' << tmpl.duration << '\t';
    char buf[32];
    for (int i = 0; i < kMelBands; ++i) {
      // %.9g round-trips float exactly through text.
      std::snprintf(buf, sizeof buf, "%.9g", static_cast<double>(tmpl.bands[i]));
      os << (i ? " " : "") << buf;
    }
    os << '\n';
  }
}

void PhonemeTable::insert(const std::string& symbol, PhonemeTemplate tmpl) {
  map_[symbol] = tmpl;
}

const PhonemeTemplate* PhonemeTable::find(const std::string& symbol) const {
  auto it = map_.find(symbol);
  return it == map_.end() ? nullptr : &it->second;
}

const PhonemeTemplate& PhonemeTable::at(const std::string& symbol) const {
  const PhonemeTemplate* tmpl = find(symbol);
  if (!tmpl) throw UnknownSymbol("no template for phoneme: " + symbol);
  return *tmpl;
}

// ---------------------------------------------------------------------------
// ReferenceAcousticModel

struct ReferenceAcousticModel::Impl {
  struct Scheduled {
    const PhonemeTemplate* tmpl;
    std::string symbol;
    int64_t unit;
  };

  ReferenceAcousticConfig cfg;
  std::vector<Scheduled> schedule;
  std::vector<int64_t> cum_phonemes;  // per fed unit
  int64_t units = 0;
  bool eos = false;
  bool stopped = false;

  size_t pos = 0;      // phoneme being rendered
  int frame_in = 0;    // frames emitted for it so far
  bool committed = false;
  int total_frames = 0;       // realized duration of the current phoneme
  MelFrame fade_target{};     // valid once committed

  std::vector<RenderedPhoneme> rendered;

  // Decides the realized duration and fade target once the pure run ends.
  void commit() {
    const Scheduled& cur = schedule[pos];
    int base = cur.tmpl->duration;
    if (pos + 1 < schedule.size()) {
      total_frames = base;
      fade_target = schedule[pos + 1].tmpl->bands;
    } else if (eos) {
      total_frames = base;
      fade_target = MelFrame{};  // silence
    } else {
      total_frames = base + cfg.hold_frames;
      fade_target = MelFrame{};
    }
    committed = true;
  }

  AttentionVector one_hot(size_t slot) const {
    AttentionVector att;
    att.weights.assign(schedule.size() + (eos ? 1 : 0), 0.0f);
    att.weights[slot] = 1.0f;
    return att;
  }
};

ReferenceAcousticModel::ReferenceAcousticModel(ReferenceAcousticConfig cfg)
    : impl_(std::make_unique<Impl>()) {
  if (cfg.crossfade_frames < 0 || cfg.hold_frames < 0) {
    throw DomainError("acoustic config: negative frame counts");
  }
  impl_->cfg = std::move(cfg);
}

ReferenceAcousticModel::~ReferenceAcousticModel() = default;

void ReferenceAcousticModel::extend_input(std::span<const Chunk> chunks) {
  Impl& im = *impl_;
  if (im.eos) throw SessionClosed("extend_input after eos");
  for (const Chunk& chunk : chunks) {
    int64_t count = 0;
    ++im.units;
    for (const PhonemeWord& word : chunk.words) {
      for (const std::string& symbol : word.phonemes) {
        const PhonemeTemplate& tmpl = im.cfg.table.at(symbol);
        if (tmpl.duration <= im.cfg.crossfade_frames) {
          throw DomainError("phoneme " + symbol +
                            ": duration must exceed the cross-fade length");
        }
        im.schedule.push_back({&tmpl, symbol, im.units});
        ++count;
      }
    }
    if (count == 0) throw DomainError("extend_input: chunk with no phonemes");
    int64_t prev = im.cum_phonemes.empty() ? 0 : im.cum_phonemes.back();
    im.cum_phonemes.push_back(prev + count);
  }
}

void ReferenceAcousticModel::feed_eos() {
  Impl& im = *impl_;
  if (im.eos) throw SessionClosed("eos already fed");
  if (im.stopped) throw SessionClosed("session already stopped");
  im.eos = true;
}

StepOutput ReferenceAcousticModel::step_frame() {
  Impl& im = *impl_;
  if (im.stopped) throw SessionClosed("step_frame after stop");
  if (im.schedule.empty() && !im.eos) {
    throw DomainError("step_frame: no input fed");
  }
  if (im.pos >= im.schedule.size()) {
    if (!im.eos) {
      throw DomainError("step_frame: decoder starved, feed input or eos");
    }
    // End-marker step: silence, attention on the eos slot, stop fires.
    im.stopped = true;
    StepOutput out;
    out.attention = im.one_hot(im.schedule.size());
    out.stop_prob = 1.0;
    return out;
  }

  const Impl::Scheduled& cur = im.schedule[im.pos];
  const int pure = cur.tmpl->duration - im.cfg.crossfade_frames;
  if (!im.committed && im.frame_in >= pure) im.commit();

  StepOutput out;
  out.attention = im.one_hot(im.pos);
  out.stop_prob = 0.0;

  if (!im.committed) {
    out.frame = cur.tmpl->bands;
  } else {
    int fade_from = im.total_frames - im.cfg.crossfade_frames;
    if (im.frame_in < fade_from) {
      out.frame = cur.tmpl->bands;
    } else {
      float alpha = static_cast<float>(im.frame_in - fade_from + 1) /
                    static_cast<float>(im.cfg.crossfade_frames + 1);
      for (int i = 0; i < kMelBands; ++i) {
        out.frame[i] = (1.0f - alpha) * cur.tmpl->bands[i] +
                       alpha * im.fade_target[i];
      }
    }
  }

  ++im.frame_in;
  // When the cross-fade is empty the decision point coincides with the
  // phoneme's end; commit now so the advance check sees the realized length.
  if (!im.committed && im.frame_in >= pure) im.commit();
  if (im.committed && im.frame_in >= im.total_frames) {
    im.rendered.push_back({cur.symbol, cur.unit, im.total_frames});
    ++im.pos;
    im.frame_in = 0;
    im.committed = false;
  }
  return out;
}

bool ReferenceAcousticModel::needs_input() const {
  const Impl& im = *impl_;
  return !im.stopped && !im.eos && im.pos >= im.schedule.size();
}

int64_t ReferenceAcousticModel::fed_units() const { return impl_->units; }

bool ReferenceAcousticModel::eos_fed() const { return impl_->eos; }

const std::vector<int64_t>& ReferenceAcousticModel::cumulative_phonemes() const {
  return impl_->cum_phonemes;
}

bool ReferenceAcousticModel::stopped() const { return impl_->stopped; }

const std::vector<RenderedPhoneme>& ReferenceAcousticModel::rendered() const {
  return impl_->rendered;
}

std::optional<int64_t> detect_boundary(
    const std::vector<int64_t>& cumulative_phonemes, int64_t last_completed,
    const AttentionVector& attention) {
  if (attention.weights.empty()) return std::nullopt;
  // The boundary rule is stated over 1-based positions: unit u is complete
  // once the argmax position exceeds the cumulative count through u.
  const int64_t pos = static_cast<int64_t>(attention.argmax()) + 1;
  int64_t completed = 0;
  for (int64_t cum : cumulative_phonemes) {
    if (pos > cum) ++completed;
  }
  if (completed > last_completed) return completed;
  return std::nullopt;
}

bool is_stopped(double stop_prob) { return stop_prob > 0.5; }

}  // namespace itts
