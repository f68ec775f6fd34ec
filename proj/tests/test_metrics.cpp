#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "itts/errors.hpp"
#include "itts/latency.hpp"
#include "itts/pipeline.hpp"
#include "itts/prosody.hpp"

using namespace itts;

namespace {

SynthesisTimeline timeline_from(const std::vector<double>& audio,
                                const std::vector<double>& synth,
                                const std::vector<double>& input = {}) {
  SynthesisTimeline tl;
  double worker = 0.0, prev_end = 0.0;
  for (size_t t = 0; t < audio.size(); ++t) {
    UnitTiming u;
    u.unit = static_cast<int64_t>(t + 1);
    u.input_available = input.empty() ? 0.0 : input[t];
    u.syn_start = worker;
    worker += synth[t];
    u.syn_finish = worker;
    u.play_start = std::max(u.syn_finish, prev_end);
    u.audio_duration = audio[t];
    u.play_end = u.play_start + audio[t];
    prev_end = u.play_end;
    tl.units.push_back(u);
  }
  return tl;
}

}  // namespace

TEST_CASE("time balance reproduces the recurrence") {
  CHECK(time_balance(std::vector<double>{2.0, 2.0},
                     std::vector<double>{0.5, 0.5}) ==
        std::vector<double>{1.5, 3.5});

  const auto tb = time_balance(std::vector<double>{0.2, 1.0},
                               std::vector<double>{0.1, 0.5});
  CHECK(tb[0] == doctest::Approx(-0.3));  // interruption after unit 1
  CHECK(tb[1] == doctest::Approx(1.0));

  // With no later synthesis, balance grows by each unit's audio.
  const auto grow = time_balance(std::vector<double>{1.0, 1.0, 1.0},
                                 std::vector<double>{0.7, 0.0, 0.0});
  CHECK(grow == std::vector<double>{1.0, 2.0, 3.0});

  CHECK_THROWS_AS(time_balance(std::vector<double>{1.0},
                               std::vector<double>{1.0, 2.0}),
                  DomainError);
}

TEST_CASE("time balance scales linearly") {
  std::mt19937 rng(2024);
  std::uniform_real_distribution<double> dist(0.05, 3.0);
  for (int trial = 0; trial < 100; ++trial) {
    const size_t m = 1 + rng() % 12;
    std::vector<double> a(m), s(m);
    for (auto& x : a) x = dist(rng);
    for (auto& x : s) x = dist(rng);
    const double lambda = dist(rng);
    std::vector<double> a2(m), s2(m);
    for (size_t i = 0; i < m; ++i) {
      a2[i] = lambda * a[i];
      s2[i] = lambda * s[i];
    }
    const auto tb = time_balance(a, s);
    const auto tb2 = time_balance(a2, s2);
    for (size_t i = 0; i < m; ++i) {
      CHECK(tb2[i] == doctest::Approx(lambda * tb[i]).epsilon(1e-12));
    }
  }
}

TEST_CASE("continuity flag agrees with simulated playback gaps") {
  std::mt19937 rng(555);
  std::uniform_real_distribution<double> dist(0.05, 2.0);
  for (int trial = 0; trial < 100; ++trial) {
    const size_t m = 2 + rng() % 10;
    std::vector<double> a(m), s(m);
    for (auto& x : a) x = dist(rng);
    for (auto& x : s) x = dist(rng);
    if (trial % 2 == 0) {
      // Adversarial case: starve playback somewhere in the middle.
      s[1 + rng() % (m - 1)] += 5.0;
    }
    const auto tb = time_balance(a, s);
    const SynthesisTimeline tl = timeline_from(a, s);

    bool gap_found = false;
    for (size_t t = 1; t < m; ++t) {
      const double gap = tl.units[t].play_start - tl.units[t - 1].play_end;
      if (gap > 1e-12) {
        gap_found = true;
        // The gap before unit t+1 equals the negative balance at step t.
        CHECK(gap == doctest::Approx(-tb[t - 1]).epsilon(1e-9));
      }
    }
    const LatencyReport rep = make_latency_report(tl);
    CHECK(rep.continuous == !gap_found);
  }
}

TEST_CASE("chunk lag and first-audio latency and rtf") {
  const SynthesisTimeline tl =
      timeline_from({0.5, 1.0}, {0.5, 0.5}, {0.5, 1.0});
  // play_end = [1.0, 2.0] by construction.
  CHECK(tl.units[0].play_end == doctest::Approx(1.0));
  CHECK(tl.units[1].play_end == doctest::Approx(2.0));
  CHECK(avg_chunk_lag(tl) == doctest::Approx(0.75));
  CHECK(first_audio_latency(tl) == doctest::Approx(0.5));

  // Lag is zero when playback ends exactly at each input's end.
  const SynthesisTimeline aligned = timeline_from({0.5, 0.5}, {0.5, 0.0},
                                                  {1.0, 1.5});
  CHECK(avg_chunk_lag(aligned) == doctest::Approx(0.0));

  CHECK(real_time_factor(timeline_from({2.0}, {1.0})) == doctest::Approx(2.0));
  CHECK(real_time_factor(timeline_from({1.0}, {1.0})) == doctest::Approx(1.0));
  const SynthesisTimeline fast = timeline_from({2.0}, {1.0});
  CHECK(avg_chunk_lag(fast) == doctest::Approx(fast.units[0].play_end));

  SynthesisTimeline zero = timeline_from({1.0}, {0.0});
  CHECK_THROWS_AS(real_time_factor(zero), DomainError);
  CHECK_THROWS_AS(avg_chunk_lag(SynthesisTimeline{}), DomainError);
}

TEST_CASE("f0 estimation on forced signals") {
  const int sr = 24000;
  std::vector<double> sine(4 * sr / 10);
  for (size_t i = 0; i < sine.size(); ++i) {
    sine[i] = 0.4 * std::sin(2.0 * std::numbers::pi * 220.0 * i / sr);
  }
  const PitchPoint p = estimate_f0(sine, sr);
  REQUIRE(p.voiced);
  CHECK(std::abs(p.f0_hz - 220.0) < 1.0);

  std::vector<double> silence(2400, 0.0);
  CHECK_FALSE(estimate_f0(silence, sr).voiced);

  std::mt19937 rng(31337);
  std::normal_distribution<double> gauss(0.0, 0.3);
  std::vector<double> noise(2400);
  for (double& x : noise) x = gauss(rng);
  CHECK_FALSE(estimate_f0(noise, sr).voiced);

  std::vector<double> tiny(100, 0.1);
  CHECK_THROWS_AS(estimate_f0(tiny, sr), DomainError);
}

TEST_CASE("track_pitch produces a uniform-hop track") {
  const int sr = 24000;
  std::vector<double> sine(sr);  // one second
  for (size_t i = 0; i < sine.size(); ++i) {
    sine[i] = 0.4 * std::sin(2.0 * std::numbers::pi * 150.0 * i / sr);
  }
  const PitchTrack track = track_pitch(sine, sr);
  CHECK(track.hop_seconds == doctest::Approx(0.010));
  CHECK(track.points.size() == (sine.size() - 960) / 240 + 1);
  for (const PitchPoint& p : track.points) {
    REQUIRE(p.voiced);
    CHECK(std::abs(p.f0_hz - 150.0) < 1.5);
  }
}

TEST_CASE("duration rmse on aligned sequences") {
  const PhonemeAlignment a = {{"K", 0.0, 0.100}, {"AE", 0.100, 0.200}};
  CHECK(duration_rmse_ms(a, a) == 0.0);

  const PhonemeAlignment b = {{"K", 0.0, 0.110}, {"AE", 0.110, 0.200}};
  CHECK(duration_rmse_ms(a, b) == doctest::Approx(10.0));

  const PhonemeAlignment wrong = {{"T", 0.0, 0.100}, {"AE", 0.100, 0.200}};
  CHECK_THROWS_AS(duration_rmse_ms(a, wrong), AlignmentMismatch);
  CHECK_THROWS_AS(duration_rmse_ms(a, PhonemeAlignment{}), AlignmentMismatch);
}

TEST_CASE("pitch rmse over jointly voiced points") {
  PitchTrack a, b;
  a.points = {{true, 200.0}, {true, 200.0}};
  b.points = {{true, 205.0}, {true, 195.0}};
  CHECK(pitch_rmse_hz(a, a) == 0.0);
  CHECK(pitch_rmse_hz(a, b) == doctest::Approx(5.0));

  PitchTrack c = b;
  c.points[0].voiced = false;
  CHECK(pitch_rmse_hz(a, c) == doctest::Approx(5.0));  // only the second pair

  PitchTrack unvoiced;
  unvoiced.points = {{false, 0.0}, {false, 0.0}};
  CHECK_THROWS_AS(pitch_rmse_hz(a, unvoiced), EmptyComparison);

  PitchTrack shorter;
  shorter.points = {{true, 200.0}};
  CHECK_THROWS_AS(pitch_rmse_hz(a, shorter), AlignmentMismatch);
}

TEST_CASE("alignments come straight from realized frame counts") {
  const std::vector<RenderedPhoneme> rendered = {
      {"DH", 1, 8}, {"AH", 1, 9}, {"K", 2, 5}};
  const PhonemeAlignment align = alignment_from_rendered(rendered, 300, 24000);
  REQUIRE(align.size() == 3);
  CHECK(align[0].start == 0.0);
  CHECK(align[0].end == doctest::Approx(8 * 300.0 / 24000));
  CHECK(align[2].start == doctest::Approx(17 * 300.0 / 24000));
  CHECK(align[2].end == doctest::Approx(22 * 300.0 / 24000));
  for (const auto& p : align) CHECK(p.end > p.start);
}

TEST_CASE("prosody deviation is zero with lookahead and positive without") {
  ReferenceAcousticConfig acfg;
  acfg.table = PhonemeTable::builtin();
  const Engine engine(
      Lexicon::load(std::string(ITTS_DATA_DIR) + "/lexicon_en.txt"),
      std::move(acfg), VocoderConfig{});
  const char* text = "the children played by the river all day";
  const int sr = engine.vocoder().config().sample_rate;
  const int gamma = engine.vocoder().config().gamma;

  SessionConfig cfg;
  cfg.policy = LookaheadPolicy{1, 0};
  const SessionResult full = engine.run_full_sentence(text, cfg);
  const PhonemeAlignment align_full =
      alignment_from_rendered(full.rendered, gamma, sr);
  const PitchTrack pitch_full = pitch_at_alignment(full.waveform, sr, align_full);

  const SessionResult la1 = engine.run_incremental(text, cfg);
  const PhonemeAlignment align_la1 =
      alignment_from_rendered(la1.rendered, gamma, sr);
  CHECK(duration_rmse_ms(align_la1, align_full) == 0.0);
  CHECK(pitch_rmse_hz(pitch_at_alignment(la1.waveform, sr, align_la1),
                      pitch_full) == 0.0);

  cfg.policy = LookaheadPolicy{0, 0};
  const SessionResult la0 = engine.run_incremental(text, cfg);
  const PhonemeAlignment align_la0 =
      alignment_from_rendered(la0.rendered, gamma, sr);
  CHECK(duration_rmse_ms(align_la0, align_full) > 0.0);
  CHECK(pitch_rmse_hz(pitch_at_alignment(la0.waveform, sr, align_la0),
                      pitch_full) > 0.0);
}
