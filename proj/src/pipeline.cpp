#include "itts/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <ostream>
#include <thread>

#include "itts/errors.hpp"
#include "itts/segment_queue.hpp"

namespace itts {

namespace {

double now_seconds() {
  using clock = std::chrono::steady_clock;
  return std::chrono::duration<double>(clock::now().time_since_epoch()).count();
}

void validate_config(const SessionConfig& cfg) {
  if (cfg.policy.k1 < 0 || cfg.policy.k2 < 0) {
    throw PolicyError("lookahead depths must be >= 0");
  }
  if (cfg.delta < 0) throw DomainError("delta must be >= 0");
  if (cfg.min_chunk_phonemes < 1) throw DomainError("l must be >= 1");
}

}  // namespace

void SynthesisTimeline::write_csv(std::ostream& os) const {
  os << "unit,input_available,syn_start,syn_finish,play_start,play_end,"
        "audio_duration\n";
  char buf[256];
  for (const UnitTiming& u : units) {
    std::snprintf(buf, sizeof buf, "%lld,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f\n",
                  static_cast<long long>(u.unit), u.input_available,
                  u.syn_start, u.syn_finish, u.play_start, u.play_end,
                  u.audio_duration);
    os << buf;
  }
}

// Everything the text-to-spectrogram stage produces for one utterance.
struct Engine::Decoded {
  std::vector<std::vector<MelFrame>> unit_frames;  // indexed by unit - 1
  std::vector<int64_t> req_units;   // fed units when each boundary fired
  std::vector<double> dec_seconds;  // wall time attributed to each unit
  std::vector<RenderedPhoneme> rendered;
  int64_t total_phonemes = 0;
  bool attention_monotone = true;
};

Engine::Engine(Lexicon lexicon, ReferenceAcousticConfig acoustic_cfg,
               VocoderConfig vocoder_cfg)
    : lexicon_(std::move(lexicon)),
      acoustic_cfg_(std::move(acoustic_cfg)),
      vocoder_(vocoder_cfg) {}

std::vector<Chunk> Engine::prepare_chunks(const std::string& text,
                                          int64_t l) const {
  std::vector<PhonemeWord> words;
  for (const std::string& w : segment_words(normalize_text(text))) {
    words.push_back(to_phonemes(w, lexicon_));
  }
  return chunk_words(words, l);
}

Engine::Decoded Engine::decode(const std::vector<Chunk>& chunks,
                               const SessionConfig& cfg) const {
  const int64_t m = static_cast<int64_t>(chunks.size());
  const auto g = [&](int64_t t) {
    return cfg.full_sentence_policy ? m : g_lookahead(cfg.policy.k1, t, m);
  };
  if (!validate_policy(g, m)) throw PolicyError("spectrogram policy invalid");

  ReferenceAcousticModel session(acoustic_cfg_);
  Decoded out;
  out.unit_frames.resize(static_cast<size_t>(m));
  out.req_units.assign(static_cast<size_t>(m), 0);
  out.dec_seconds.assign(static_cast<size_t>(m), 0.0);

  int64_t fed = 0;
  const auto feed_to = [&](int64_t target) {
    target = std::min(target, m);
    while (fed < target) {
      session.extend_input(std::span<const Chunk>(&chunks[fed], 1));
      ++fed;
    }
    if (fed == m && !session.eos_fed()) session.feed_eos();
  };

  feed_to(g(1));
  int64_t last_completed = 0;
  int64_t prev_pos = 0;
  while (!session.stopped()) {
    if (session.needs_input()) feed_to(fed + 1);  // starvation feed

    const double t0 = now_seconds();
    StepOutput step = session.step_frame();
    const double dt = now_seconds() - t0;

    // 1-based position of the attention peak; maps the frame to its unit.
    const int64_t pos = static_cast<int64_t>(step.attention.argmax()) + 1;
    if (pos < prev_pos) out.attention_monotone = false;
    prev_pos = pos;
    const auto& cum = session.cumulative_phonemes();
    const auto owner_it = std::lower_bound(cum.begin(), cum.end(), pos);
    if (owner_it != cum.end()) {
      const size_t owner = static_cast<size_t>(owner_it - cum.begin());
      out.unit_frames[owner].push_back(step.frame);
      out.dec_seconds[owner] += dt;
    } else if (m > 0) {
      out.dec_seconds[static_cast<size_t>(m - 1)] += dt;  // end-marker step
    }

    if (auto b = detect_boundary(cum, last_completed, step.attention)) {
      for (int64_t u = last_completed + 1; u <= *b; ++u) {
        out.req_units[static_cast<size_t>(u - 1)] = fed;
      }
      last_completed = *b;
      if (last_completed < m) feed_to(g(last_completed + 1));
    }
    if (is_stopped(step.stop_prob)) break;
  }

  if (last_completed != m) {
    throw DomainError("acoustic backend did not complete every unit");
  }
  for (const auto& frames : out.unit_frames) {
    if (frames.empty()) throw DomainError("acoustic backend produced an empty unit");
  }
  out.rendered = session.rendered();
  for (const Chunk& c : chunks) out.total_phonemes += c.phoneme_count;
  return out;
}

Engine::Decoded Engine::decode_independent(
    const std::vector<Chunk>& chunks) const {
  const int64_t m = static_cast<int64_t>(chunks.size());
  Decoded out;
  out.unit_frames.resize(static_cast<size_t>(m));
  out.req_units.assign(static_cast<size_t>(m), 0);
  out.dec_seconds.assign(static_cast<size_t>(m), 0.0);
  for (int64_t t = 1; t <= m; ++t) {
    // Fresh session per chunk; the end marker is never fed, so the chunk is
    // rendered as a prefix with unknown continuation.
    ReferenceAcousticModel session(acoustic_cfg_);
    session.extend_input(std::span<const Chunk>(&chunks[t - 1], 1));
    const double t0 = now_seconds();
    while (!session.needs_input()) {
      out.unit_frames[static_cast<size_t>(t - 1)].push_back(
          session.step_frame().frame);
    }
    out.dec_seconds[static_cast<size_t>(t - 1)] = now_seconds() - t0;
    out.req_units[static_cast<size_t>(t - 1)] = t;
    for (RenderedPhoneme p : session.rendered()) {
      p.unit = t;
      out.rendered.push_back(std::move(p));
    }
  }
  for (const Chunk& c : chunks) out.total_phonemes += c.phoneme_count;
  return out;
}

SessionResult Engine::assemble(Decoded decoded,
                               const std::vector<double>& arrivals,
                               const SessionConfig& cfg,
                               WindowPolicy window_policy) const {
  const int64_t m = static_cast<int64_t>(decoded.unit_frames.size());
  const VocoderConfig& vcfg = vocoder_.config();
  const int gamma = vcfg.gamma;

  const auto h = [&](int64_t t) -> int64_t {
    switch (window_policy) {
      case WindowPolicy::monolith: return m;
      case WindowPolicy::isolated: return t;
      case WindowPolicy::overlap:
        return cfg.full_sentence_policy ? m : h_lookahead(cfg.policy.k2, t, m);
    }
    return m;
  };
  if (window_policy == WindowPolicy::overlap &&
      !validate_policy([&](int64_t t) { return h(t); }, m)) {
    throw PolicyError("wave policy invalid");
  }

  // Frame offsets in utterance coordinates.
  std::vector<int64_t> counts(static_cast<size_t>(m)), firsts(static_cast<size_t>(m));
  int64_t total_frames = 0;
  for (int64_t u = 0; u < m; ++u) {
    firsts[static_cast<size_t>(u)] = total_frames;
    counts[static_cast<size_t>(u)] =
        static_cast<int64_t>(decoded.unit_frames[static_cast<size_t>(u)].size());
    total_frames += counts[static_cast<size_t>(u)];
  }

  // One noise vector per utterance, fixed across modes for a given text: the
  // capacity bound depends only on the chunking, not on the policy.
  int64_t capacity = acoustic_cfg_.hold_frames * m;
  for (const RenderedPhoneme& p : decoded.rendered) {
    capacity += acoustic_cfg_.table.at(p.symbol).duration;
  }
  capacity = std::max(capacity, total_frames);
  const NoiseVector noise = sample_noise(cfg.seed, capacity, gamma);

  // Spectrogram-to-wave stage, unit by unit.
  std::vector<WaveSegment> segments;
  std::vector<double> voc_seconds;
  std::vector<int64_t> voc_extent;
  if (window_policy == WindowPolicy::monolith) {
    std::vector<MelFrame> all;
    all.reserve(static_cast<size_t>(total_frames));
    for (const auto& frames : decoded.unit_frames) {
      all.insert(all.end(), frames.begin(), frames.end());
    }
    const double t0 = now_seconds();
    WaveSegment seg;
    seg.samples = synthesize_full(all, noise, vocoder_);
    voc_seconds.push_back(now_seconds() - t0);
    seg.unit_index = 1;
    seg.first_frame = 0;
    seg.frame_count = total_frames;
    segments.push_back(std::move(seg));
    voc_extent.push_back(total_frames);
  } else {
    for (int64_t t = 1; t <= m; ++t) {
      const int64_t lo = (window_policy == WindowPolicy::isolated)
                             ? t
                             : std::max<int64_t>(1, t - 1);
      const int64_t hi = h(t);
      FrameWindow window;
      window.first_frame = firsts[static_cast<size_t>(lo - 1)];
      window.unit_first = firsts[static_cast<size_t>(t - 1)];
      window.unit_count = counts[static_cast<size_t>(t - 1)];
      for (int64_t u = lo; u <= hi; ++u) {
        const auto& frames = decoded.unit_frames[static_cast<size_t>(u - 1)];
        window.frames.insert(window.frames.end(), frames.begin(), frames.end());
      }
      const int64_t window_count = static_cast<int64_t>(window.frames.size());
      const int64_t need = (window.first_frame + window_count) * gamma;
      if (static_cast<int64_t>(noise.samples.size()) < need) {
        throw NoiseExhausted("noise vector shorter than the utterance");
      }
      NoiseSlice slice;
      slice.first_sample = window.first_frame * gamma;
      slice.samples = std::span<const double>(
          noise.samples.data() + slice.first_sample,
          static_cast<size_t>(window_count * gamma));
      const int64_t delta =
          (window_policy == WindowPolicy::isolated) ? 0 : cfg.delta;

      const double t0 = now_seconds();
      segments.push_back(synthesize_overlap(window, slice, t, delta, vocoder_));
      voc_seconds.push_back(now_seconds() - t0);

      const int64_t unit_end = window.unit_first + window.unit_count;
      const int64_t left =
          std::min<int64_t>(delta, window.unit_first - window.first_frame);
      const int64_t right =
          std::min<int64_t>(delta, window.first_frame + window_count - unit_end);
      voc_extent.push_back(left + window.unit_count + right);
    }
  }

  // Task durations for the virtual clock.
  const bool modeled = cfg.timing == TimingModel::modeled;
  std::vector<double> dec_dur(static_cast<size_t>(m));
  for (int64_t u = 0; u < m; ++u) {
    dec_dur[static_cast<size_t>(u)] =
        modeled ? cfg.cost_per_task +
                      cfg.cost_spec_per_frame * static_cast<double>(counts[static_cast<size_t>(u)])
                : decoded.dec_seconds[static_cast<size_t>(u)];
  }
  std::vector<double> voc_dur(voc_seconds.size());
  for (size_t i = 0; i < voc_seconds.size(); ++i) {
    voc_dur[i] = modeled ? cfg.cost_per_task +
                               cfg.cost_voc_per_frame * static_cast<double>(voc_extent[i])
                         : voc_seconds[i];
  }

  // Serial worker: decode tasks complete at their boundaries, each gated on
  // the arrival of the chunks it consumed; vocode tasks follow in unit order.
  // Playback is concurrent with later synthesis.
  SynthesisTimeline timeline;
  const int64_t rows = (window_policy == WindowPolicy::monolith) ? 1 : m;
  double worker = 0.0;
  int64_t emitted = 0;
  for (int64_t t = 1; t <= rows; ++t) {
    UnitTiming row;
    row.unit = t;
    row.input_available = arrivals.empty() ? 0.0 : arrivals[static_cast<size_t>(
        std::min<int64_t>(t, static_cast<int64_t>(arrivals.size())) - 1)];
    bool started = false;
    const int64_t decode_through =
        (window_policy == WindowPolicy::monolith) ? m : h(t);
    while (emitted < decode_through) {
      ++emitted;
      const int64_t req = decoded.req_units[static_cast<size_t>(emitted - 1)];
      const double ready =
          (arrivals.empty() || req < 1)
              ? 0.0
              : arrivals[static_cast<size_t>(std::min<int64_t>(req, m) - 1)];
      const double start = std::max(worker, ready);
      if (!started) {
        row.syn_start = start;
        started = true;
      }
      worker = start + dec_dur[static_cast<size_t>(emitted - 1)];
    }
    if (!started) row.syn_start = worker;
    worker += voc_dur[static_cast<size_t>(t - 1)];
    row.syn_finish = worker;
    row.audio_duration = static_cast<double>(segments[static_cast<size_t>(t - 1)]
                                                 .samples.size()) /
                         vcfg.sample_rate;
    timeline.units.push_back(row);
  }

  // Playback recurrence on the virtual clock.
  double prev_end = 0.0;
  for (UnitTiming& row : timeline.units) {
    row.play_start = std::max(row.syn_finish, prev_end);
    row.play_end = row.play_start + row.audio_duration;
    prev_end = row.play_end;
  }

  // Hand the segments to the playback activity through the bounded queue;
  // it assembles the utterance waveform (and paces real time in wall mode).
  SessionResult result;
  result.segments = std::move(segments);
  BoundedQueue<const WaveSegment*> queue(cfg.queue_capacity);
  std::vector<double> wall_play(timeline.units.size() * 2, 0.0);
  const bool wall = cfg.playback == PlaybackMode::wall_clock;
  const double run_start = now_seconds();
  std::thread consumer([&] {
    size_t i = 0;
    while (auto seg = queue.pop()) {
      if (wall) {
        wall_play[2 * i] = now_seconds() - run_start;
        std::this_thread::sleep_for(std::chrono::duration<double>(
            static_cast<double>((*seg)->samples.size()) / vcfg.sample_rate));
        wall_play[2 * i + 1] = now_seconds() - run_start;
      }
      result.waveform.insert(result.waveform.end(), (*seg)->samples.begin(),
                             (*seg)->samples.end());
      ++i;
    }
  });
  for (const WaveSegment& seg : result.segments) queue.push(&seg);
  queue.close();
  consumer.join();
  if (wall) {
    for (size_t i = 0; i < timeline.units.size(); ++i) {
      timeline.units[i].play_start = wall_play[2 * i];
      timeline.units[i].play_end = wall_play[2 * i + 1];
    }
  }

  result.timeline = std::move(timeline);
  result.spectrograms.reserve(static_cast<size_t>(m));
  for (int64_t u = 0; u < m; ++u) {
    result.spectrograms.push_back(
        {std::move(decoded.unit_frames[static_cast<size_t>(u)]), u + 1});
  }
  result.unit_frame_counts = std::move(counts);
  result.unit_first_frames = std::move(firsts);
  result.rendered = std::move(decoded.rendered);
  result.total_phonemes = decoded.total_phonemes;
  result.chunk_count = m;
  result.attention_monotone = decoded.attention_monotone;
  return result;
}

SessionResult Engine::run_full_sentence(const std::string& text,
                                        const SessionConfig& cfg) const {
  validate_config(cfg);
  SessionConfig full_cfg = cfg;
  full_cfg.full_sentence_policy = true;
  const std::vector<Chunk> chunks = prepare_chunks(text, cfg.min_chunk_phonemes);
  Decoded decoded = decode(chunks, full_cfg);
  return assemble(std::move(decoded), {}, full_cfg, WindowPolicy::monolith);
}

SessionResult Engine::run_incremental(const std::string& text,
                                      const SessionConfig& cfg) const {
  validate_config(cfg);
  const std::vector<Chunk> chunks = prepare_chunks(text, cfg.min_chunk_phonemes);
  Decoded decoded = decode(chunks, cfg);
  return assemble(std::move(decoded), {}, cfg, WindowPolicy::overlap);
}

SessionResult Engine::run_shadow(const std::vector<InputEvent>& events,
                                 const SessionConfig& cfg) const {
  validate_config(cfg);
  if (events.empty()) throw ScheduleError("shadow: no input events");
  std::vector<Chunk> chunks;
  std::vector<double> arrivals;
  double prev = -1.0;
  for (const InputEvent& e : events) {
    if (e.arrival_time < 0.0 || e.arrival_time < prev) {
      throw ScheduleError("shadow: arrival times must be non-decreasing");
    }
    prev = e.arrival_time;
    chunks.push_back(e.chunk);
    arrivals.push_back(e.arrival_time);
  }
  Decoded decoded = decode(chunks, cfg);
  return assemble(std::move(decoded), arrivals, cfg, WindowPolicy::overlap);
}

SessionResult Engine::run_independent(const std::string& text,
                                      const SessionConfig& cfg) const {
  validate_config(cfg);
  const std::vector<Chunk> chunks = prepare_chunks(text, cfg.min_chunk_phonemes);
  Decoded decoded = decode_independent(chunks);
  return assemble(std::move(decoded), {}, cfg, WindowPolicy::isolated);
}

}  // namespace itts
