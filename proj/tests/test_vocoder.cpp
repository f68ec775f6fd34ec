#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "itts/errors.hpp"
#include "itts/prosody.hpp"
#include "itts/vocoder.hpp"

using namespace itts;

namespace {

std::vector<MelFrame> random_frames(int count, uint32_t seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<float> dist(0.05f, 0.8f);
  std::vector<MelFrame> frames(static_cast<size_t>(count));
  for (MelFrame& f : frames) {
    for (float& b : f) b = dist(rng);
  }
  return frames;
}

// Concatenates per-unit overlap synthesis, windows built like the pipeline
// builds them: units t-1 .. min(t+k2, m).
std::vector<double> incremental_concat(const std::vector<MelFrame>& frames,
                                       const std::vector<int64_t>& unit_counts,
                                       const NoiseVector& noise,
                                       const VocoderBackend& backend,
                                       int64_t delta, int64_t k2) {
  const int gamma = backend.config().gamma;
  const int64_t m = static_cast<int64_t>(unit_counts.size());
  std::vector<int64_t> firsts(static_cast<size_t>(m));
  int64_t total = 0;
  for (int64_t u = 0; u < m; ++u) {
    firsts[static_cast<size_t>(u)] = total;
    total += unit_counts[static_cast<size_t>(u)];
  }
  std::vector<double> out;
  for (int64_t t = 1; t <= m; ++t) {
    const int64_t lo = std::max<int64_t>(1, t - 1);
    const int64_t hi = std::min<int64_t>(t + k2, m);
    FrameWindow window;
    window.first_frame = firsts[static_cast<size_t>(lo - 1)];
    window.unit_first = firsts[static_cast<size_t>(t - 1)];
    window.unit_count = unit_counts[static_cast<size_t>(t - 1)];
    const int64_t hi_end = (hi == m) ? total : firsts[static_cast<size_t>(hi)];
    window.frames.assign(frames.begin() + window.first_frame,
                         frames.begin() + hi_end);
    NoiseSlice slice;
    slice.first_sample = window.first_frame * gamma;
    slice.samples = std::span<const double>(
        noise.samples.data() + slice.first_sample,
        static_cast<size_t>((hi_end - window.first_frame) * gamma));
    const WaveSegment seg = synthesize_overlap(window, slice, t, delta, backend);
    out.insert(out.end(), seg.samples.begin(), seg.samples.end());
  }
  return out;
}

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  REQUIRE(a.size() == b.size());
  double worst = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    worst = std::max(worst, std::abs(a[i] - b[i]));
  }
  return worst;
}

}  // namespace

TEST_CASE("noise sampling is deterministic with the right length and stats") {
  const NoiseVector a = sample_noise(9, 400, 300);
  const NoiseVector b = sample_noise(9, 400, 300);
  CHECK(a.samples == b.samples);
  CHECK(a.samples.size() == 400u * 300u);

  const NoiseVector c = sample_noise(10, 400, 300);
  size_t differing = 0;
  for (size_t i = 0; i < a.samples.size(); ++i) {
    if (a.samples[i] != c.samples[i]) ++differing;
  }
  CHECK(differing >= a.samples.size() * 99 / 100);

  double mean = 0.0;
  for (double x : a.samples) mean += x;
  mean /= static_cast<double>(a.samples.size());
  double var = 0.0;
  for (double x : a.samples) var += (x - mean) * (x - mean);
  var /= static_cast<double>(a.samples.size());
  CHECK(std::abs(mean) < 0.05);
  CHECK(std::abs(var - 1.0) < 0.05);

  CHECK(sample_noise(1, 10, 300).samples.size() == 3000u);
  CHECK_THROWS_AS(sample_noise(1, 0, 300), DomainError);
}

TEST_CASE("vocoder config accepts only the two hop sizes") {
  VocoderConfig cfg;
  cfg.gamma = 256;
  CHECK_NOTHROW(cfg.validate());
  cfg.gamma = 300;
  CHECK_NOTHROW(cfg.validate());
  cfg.gamma = 128;
  CHECK_THROWS_AS(cfg.validate(), DomainError);
}

TEST_CASE("full synthesis length arithmetic and the energy gate") {
  const ReferenceVocoder voc(VocoderConfig{});
  const NoiseVector noise = sample_noise(42, 16, 300);

  const auto frames = random_frames(7, 1);
  CHECK(synthesize_full(frames, noise, voc).size() == 2100u);

  std::vector<MelFrame> silence(7);
  for (MelFrame& f : silence) f.fill(0.0f);
  const std::vector<double> out = synthesize_full(silence, noise, voc);
  for (double s : out) CHECK(s == 0.0);

  const auto too_many = random_frames(17, 2);
  CHECK_THROWS_AS(synthesize_full(too_many, noise, voc), NoiseExhausted);
}

TEST_CASE("perturbing one frame moves only samples within the radius") {
  const ReferenceVocoder voc(VocoderConfig{});
  const int R = voc.config().receptive_radius;
  const int gamma = voc.config().gamma;
  const NoiseVector noise = sample_noise(3, 64, gamma);
  auto frames = random_frames(40, 3);
  const std::vector<double> base = synthesize_full(frames, noise, voc);

  const int j = 21;
  for (float& b : frames[j]) b *= 1.5f;
  const std::vector<double> bent = synthesize_full(frames, noise, voc);

  for (size_t n = 0; n < base.size(); ++n) {
    if (base[n] != bent[n]) {
      const int64_t frame = static_cast<int64_t>(n) / gamma;
      CHECK(frame >= j - R);
      CHECK(frame <= j + R);
    }
  }
}

TEST_CASE("noise enters each sample only at its own position") {
  const ReferenceVocoder voc(VocoderConfig{});
  const int gamma = voc.config().gamma;
  NoiseVector noise = sample_noise(5, 12, gamma);
  const auto frames = random_frames(12, 4);
  const std::vector<double> base = synthesize_full(frames, noise, voc);

  const size_t n = 1777;
  noise.samples[n] += 2.0;
  const std::vector<double> bent = synthesize_full(frames, noise, voc);
  for (size_t i = 0; i < base.size(); ++i) {
    if (i == n) {
      const double energy = ReferenceVocoder::frame_energy(frames[i / gamma]);
      CHECK(bent[i] - base[i] ==
            doctest::Approx(ReferenceVocoder::kNoiseGain * energy * 2.0));
    } else {
      CHECK(base[i] == bent[i]);
    }
  }
}

TEST_CASE("a repeated constant frame yields the mapped oscillator frequency") {
  const ReferenceVocoder voc(VocoderConfig{});
  const int band = 40;
  MelFrame frame{};
  frame[band] = 0.7f;
  std::vector<MelFrame> frames(100, frame);
  const NoiseVector noise = sample_noise(11, 120, voc.config().gamma);
  const std::vector<double> wave = synthesize_full(frames, noise, voc);

  // Estimate in the interior, away from the causal ramp-in.
  const int sr = voc.config().sample_rate;
  const PitchPoint pitch = estimate_f0(
      std::span<const double>(wave.data() + 10 * 300, 960 * 2), sr);
  REQUIRE(pitch.voiced);
  CHECK(pitch.f0_hz ==
        doctest::Approx(ReferenceVocoder::band_frequency_hz(band)).epsilon(0.01));
}

TEST_CASE("overlap synthesis equals full synthesis once delta reaches the radius") {
  const ReferenceVocoder voc(VocoderConfig{});
  const int gamma = voc.config().gamma;
  const std::vector<int64_t> units = {30, 42, 25, 8};
  int64_t total = 0;
  for (int64_t u : units) total += u;
  const auto frames = random_frames(static_cast<int>(total), 5);
  const NoiseVector noise = sample_noise(21, total, gamma);
  const std::vector<double> full = synthesize_full(frames, noise, voc);

  for (int64_t k2 : {0, 1}) {
    for (int64_t delta : {8, 15}) {
      const std::vector<double> inc =
          incremental_concat(frames, units, noise, voc, delta, k2);
      REQUIRE(inc.size() == full.size());
      CHECK(inc == full);  // bit-exact
    }
  }
}

TEST_CASE("seam discrepancy shrinks as delta grows and vanishes at the radius") {
  const ReferenceVocoder voc(VocoderConfig{});
  std::mt19937 rng(99);
  for (int trial = 0; trial < 6; ++trial) {
    std::vector<int64_t> units;
    int64_t total = 0;
    const int m = 3 + static_cast<int>(rng() % 3);
    for (int u = 0; u < m; ++u) {
      units.push_back(12 + static_cast<int64_t>(rng() % 30));
      total += units.back();
    }
    const auto frames = random_frames(static_cast<int>(total),
                                      1000 + static_cast<uint32_t>(trial));
    const NoiseVector noise = sample_noise(31 + trial, total, 300);
    const std::vector<double> full = synthesize_full(frames, noise, voc);

    double prev = std::numeric_limits<double>::infinity();
    for (int64_t delta : {0, 2, 4, 6, 8}) {
      const double gap = max_abs_diff(
          incremental_concat(frames, units, noise, voc, delta, 0), full);
      CHECK(gap <= prev);
      prev = gap;
      if (delta == 0) CHECK(gap > 0.0);
      if (delta == 8) CHECK(gap == 0.0);
    }
  }
}

TEST_CASE("first unit has no left context but keeps its exact length") {
  const ReferenceVocoder voc(VocoderConfig{});
  const auto frames = random_frames(20, 6);
  const NoiseVector noise = sample_noise(77, 20, 300);
  FrameWindow window;
  window.frames = frames;
  window.first_frame = 0;
  window.unit_first = 0;
  window.unit_count = 20;
  NoiseSlice slice{std::span<const double>(noise.samples.data(), 20u * 300u), 0};
  const WaveSegment seg = synthesize_overlap(window, slice, 1, 15, voc);
  CHECK(seg.samples.size() == 20u * 300u);
  CHECK(seg.first_frame == 0);
  CHECK(seg.frame_count == 20);
}

TEST_CASE("misaligned noise slices are rejected") {
  const ReferenceVocoder voc(VocoderConfig{});
  const auto frames = random_frames(10, 7);
  const NoiseVector noise = sample_noise(5, 12, 300);
  FrameWindow window;
  window.frames = frames;
  window.first_frame = 2;
  window.unit_first = 2;
  window.unit_count = 10;

  NoiseSlice wrong_offset{
      std::span<const double>(noise.samples.data(), 10u * 300u), 0};
  CHECK_THROWS_AS(synthesize_overlap(window, wrong_offset, 1, 8, voc),
                  AlignmentError);

  NoiseSlice wrong_size{
      std::span<const double>(noise.samples.data() + 600, 9u * 300u), 600};
  CHECK_THROWS_AS(synthesize_overlap(window, wrong_size, 1, 8, voc),
                  AlignmentError);
}
