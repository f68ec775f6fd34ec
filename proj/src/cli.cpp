#include "itts/cli.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>

#include "itts/errors.hpp"
#include "itts/latency.hpp"
#include "itts/pipeline.hpp"
#include "itts/prosody.hpp"
#include "itts/wav.hpp"

namespace itts {

namespace {

namespace fs = std::filesystem;

struct CommonOptions {
  std::string lexicon_path = "data/lexicon_en.txt";
  std::string templates_path = "data/phoneme_table_en.txt";
  int64_t k1 = 1;
  int64_t k2 = 0;
  int64_t delta = 15;
  int64_t l = 6;
  uint64_t seed = 42;
  int gamma = 300;
  std::string timing = "modeled";
};

void add_common(CLI::App* cmd, CommonOptions& opt) {
  cmd->add_option("--lexicon", opt.lexicon_path, "Lexicon file");
  cmd->add_option("--templates", opt.templates_path, "Phoneme template table");
  cmd->add_option("--k1", opt.k1, "Spectrogram lookahead")->check(CLI::NonNegativeNumber);
  cmd->add_option("--k2", opt.k2, "Wave lookahead")->check(CLI::NonNegativeNumber);
  cmd->add_option("--delta", opt.delta, "Overlap frames per side")
      ->check(CLI::NonNegativeNumber);
  cmd->add_option("--l", opt.l, "Minimum phonemes per chunk")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--seed", opt.seed, "Noise seed");
  cmd->add_option("--gamma", opt.gamma, "Samples per frame (256 or 300)");
  cmd->add_option("--timing", opt.timing, "Synthesis clock: modeled or measured")
      ->check(CLI::IsMember({"modeled", "measured"}));
}

Engine make_engine(const CommonOptions& opt) {
  ReferenceAcousticConfig acfg;
  acfg.table = PhonemeTable::load(opt.templates_path);
  VocoderConfig vcfg;
  vcfg.gamma = opt.gamma;
  vcfg.validate();
  return Engine(Lexicon::load(opt.lexicon_path), std::move(acfg), vcfg);
}

SessionConfig make_session_config(const CommonOptions& opt, uint64_t seed) {
  SessionConfig cfg;
  cfg.policy = LookaheadPolicy{opt.k1, opt.k2};
  cfg.delta = opt.delta;
  cfg.min_chunk_phonemes = opt.l;
  cfg.seed = seed;
  cfg.timing =
      opt.timing == "measured" ? TimingModel::measured : TimingModel::modeled;
  return cfg;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw DomainError("cannot open for writing: " + path);
  os << content;
}

struct ReportRow {
  std::string sentence_id;
  int64_t length_phonemes = 0;
  std::string mode;
  int64_t k1 = 0, k2 = 0;
  double first_audio = 0.0, avg_lag = 0.0, min_tb = 0.0, rtf = 0.0;
  bool continuous = true;
};

ReportRow make_row(const std::string& id, const std::string& mode,
                   const CommonOptions& opt, const SessionResult& result) {
  const LatencyReport rep = make_latency_report(result.timeline);
  ReportRow row;
  row.sentence_id = id;
  row.length_phonemes = result.total_phonemes;
  row.mode = mode;
  row.k1 = opt.k1;
  row.k2 = opt.k2;
  row.first_audio = rep.first_audio_latency;
  row.avg_lag = rep.avg_chunk_lag;
  row.min_tb = *std::min_element(rep.tb_series.begin(), rep.tb_series.end());
  row.rtf = rep.rtf;
  row.continuous = rep.continuous;
  return row;
}

std::string report_csv(const std::vector<ReportRow>& rows) {
  std::ostringstream os;
  os << "sentence_id,length_phonemes,mode,k1,k2,first_audio_latency,"
        "avg_chunk_lag,min_tb,rtf,continuous\n";
  for (const ReportRow& r : rows) {
    os << r.sentence_id << ',' << r.length_phonemes << ',' << r.mode << ','
       << r.k1 << ',' << r.k2 << ',' << fmt(r.first_audio) << ','
       << fmt(r.avg_lag) << ',' << fmt(r.min_tb) << ',' << fmt(r.rtf) << ','
       << (r.continuous ? 1 : 0) << '\n';
  }
  return os.str();
}

// Rows averaged over sentences sharing the same phoneme count.
std::vector<ReportRow> group_rows(const std::vector<ReportRow>& rows) {
  std::map<std::pair<std::string, int64_t>, std::vector<const ReportRow*>> groups;
  for (const ReportRow& r : rows) {
    groups[{r.mode, r.length_phonemes}].push_back(&r);
  }
  std::vector<ReportRow> out;
  for (const auto& [key, members] : groups) {
    ReportRow g;
    g.sentence_id = "len:" + std::to_string(key.second);
    g.length_phonemes = key.second;
    g.mode = key.first;
    g.k1 = members.front()->k1;
    g.k2 = members.front()->k2;
    g.continuous = true;
    for (const ReportRow* r : members) {
      g.first_audio += r->first_audio;
      g.avg_lag += r->avg_lag;
      g.min_tb += r->min_tb;
      g.rtf += r->rtf;
      g.continuous = g.continuous && r->continuous;
    }
    const double n = static_cast<double>(members.size());
    g.first_audio /= n;
    g.avg_lag /= n;
    g.min_tb /= n;
    g.rtf /= n;
    out.push_back(std::move(g));
  }
  return out;
}

void synth_one(const Engine& engine, const std::string& text,
               const SessionConfig& cfg, bool full_mode,
               const std::string& wav_path, const std::string& csv_path) {
  const SessionResult result = full_mode ? engine.run_full_sentence(text, cfg)
                                         : engine.run_incremental(text, cfg);
  write_wav_pcm16(wav_path, result.waveform, engine.vocoder().config().sample_rate);
  std::ostringstream os;
  result.timeline.write_csv(os);
  write_file(csv_path, os.str());
}

std::string timeline_csv_path(const std::string& wav_path) {
  fs::path p(wav_path);
  p.replace_extension("");
  return p.string() + ".timeline.csv";
}

// sentence_id,chunk_index,arrival_seconds keyed by 1-based sentence index.
std::map<int64_t, std::vector<double>> load_schedule(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw DomainError("cannot open schedule file: " + path);
  std::map<int64_t, std::map<int64_t, double>> raw;
  std::string line;
  bool first = true;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (first && line.rfind("sentence_id", 0) == 0) {
      first = false;
      continue;
    }
    first = false;
    std::istringstream ls(line);
    std::string a, b, c;
    if (!std::getline(ls, a, ',') || !std::getline(ls, b, ',') ||
        !std::getline(ls, c)) {
      throw ScheduleError("schedule: malformed line: " + line);
    }
    raw[std::stoll(a)][std::stoll(b)] = std::stod(c);
  }
  std::map<int64_t, std::vector<double>> out;
  for (const auto& [sid, chunks] : raw) {
    std::vector<double>& arrivals = out[sid];
    int64_t expect = 1;
    for (const auto& [idx, at] : chunks) {
      if (idx != expect++) {
        throw ScheduleError("schedule: sentence " + std::to_string(sid) +
                            " is missing chunk " + std::to_string(expect - 1));
      }
      arrivals.push_back(at);
    }
  }
  return out;
}

int cmd_synth(const CommonOptions& opt, const std::string& text,
              const std::string& corpus_path, const std::string& mode,
              const std::string& playback, const std::string& out_path) {
  const Engine engine = make_engine(opt);
  const bool full_mode = mode == "full";
  if (!corpus_path.empty()) {
    const std::vector<std::string> sentences = load_corpus(corpus_path);
    fs::create_directories(out_path);
    for (size_t i = 0; i < sentences.size(); ++i) {
      SessionConfig cfg = make_session_config(opt, opt.seed + i);
      if (playback == "wall") cfg.playback = PlaybackMode::wall_clock;
      char name[32];
      std::snprintf(name, sizeof name, "sent_%04zu", i + 1);
      const std::string base = (fs::path(out_path) / name).string();
      synth_one(engine, sentences[i], cfg, full_mode, base + ".wav",
                base + ".timeline.csv");
    }
    std::cout << "wrote " << sentences.size() << " sentences to " << out_path
              << "\n";
  } else {
    SessionConfig cfg = make_session_config(opt, opt.seed);
    if (playback == "wall") cfg.playback = PlaybackMode::wall_clock;
    synth_one(engine, text, cfg, full_mode, out_path,
              timeline_csv_path(out_path));
    std::cout << "wrote " << out_path << "\n";
  }
  return 0;
}

int cmd_bench_latency(const CommonOptions& opt, const std::string& corpus_path,
                      const std::string& out_path) {
  const Engine engine = make_engine(opt);
  const std::vector<std::string> sentences = load_corpus(corpus_path);
  std::vector<ReportRow> rows;
  for (size_t i = 0; i < sentences.size(); ++i) {
    const SessionConfig cfg = make_session_config(opt, opt.seed + i);
    const std::string id = std::to_string(i + 1);
    rows.push_back(make_row(id, "full", opt,
                            engine.run_full_sentence(sentences[i], cfg)));
    rows.push_back(make_row(id, "incremental", opt,
                            engine.run_incremental(sentences[i], cfg)));
  }
  const std::vector<ReportRow> groups = group_rows(rows);
  rows.insert(rows.end(), groups.begin(), groups.end());
  write_file(out_path, report_csv(rows));
  std::cout << "wrote " << out_path << "\n";
  return 0;
}

int cmd_shadow(const CommonOptions& opt, const std::string& corpus_path,
               const std::string& schedule_path, double rate,
               const std::string& policy, const std::string& out_path) {
  const Engine engine = make_engine(opt);
  const std::vector<std::string> sentences = load_corpus(corpus_path);
  std::map<int64_t, std::vector<double>> schedule;
  if (!schedule_path.empty()) schedule = load_schedule(schedule_path);

  std::vector<ReportRow> rows;
  for (size_t i = 0; i < sentences.size(); ++i) {
    SessionConfig cfg = make_session_config(opt, opt.seed + i);
    cfg.mode = RunMode::shadow;
    cfg.full_sentence_policy = policy == "full";
    const std::vector<Chunk> chunks =
        engine.prepare_chunks(sentences[i], cfg.min_chunk_phonemes);

    std::vector<double> arrivals;
    if (!schedule_path.empty()) {
      auto it = schedule.find(static_cast<int64_t>(i + 1));
      if (it == schedule.end()) {
        throw ScheduleError("schedule: no entry for sentence " +
                            std::to_string(i + 1));
      }
      arrivals = it->second;
      if (arrivals.size() != chunks.size()) {
        throw ScheduleError("schedule: sentence " + std::to_string(i + 1) +
                            " has " + std::to_string(arrivals.size()) +
                            " arrivals for " + std::to_string(chunks.size()) +
                            " chunks");
      }
    } else {
      // Proportional schedule: each chunk arrives when a speaker reading at
      // the reference pace would finish it.
      const SessionResult ref = engine.run_full_sentence(sentences[i], cfg);
      const double frame_seconds = static_cast<double>(opt.gamma) /
                                   engine.vocoder().config().sample_rate;
      double t = 0.0;
      for (int64_t frames : ref.unit_frame_counts) {
        t += rate * static_cast<double>(frames) * frame_seconds;
        arrivals.push_back(t);
      }
    }

    std::vector<InputEvent> events;
    for (size_t c = 0; c < chunks.size(); ++c) {
      events.push_back({chunks[c], arrivals[c]});
    }
    rows.push_back(make_row(std::to_string(i + 1),
                            cfg.full_sentence_policy ? "shadow_full"
                                                     : "shadow_lookahead",
                            opt, engine.run_shadow(events, cfg)));
  }
  const std::vector<ReportRow> groups = group_rows(rows);
  rows.insert(rows.end(), groups.begin(), groups.end());
  write_file(out_path, report_csv(rows));
  std::cout << "wrote " << out_path << "\n";
  return 0;
}

int cmd_prosody(const CommonOptions& opt, const std::string& corpus_path,
                bool independent, const std::string& out_path) {
  const Engine engine = make_engine(opt);
  const std::vector<std::string> sentences = load_corpus(corpus_path);
  const int sample_rate = engine.vocoder().config().sample_rate;
  const int gamma = engine.vocoder().config().gamma;

  std::ostringstream os;
  os << "sentence_id,mode,k1,k2,duration_rmse_ms,pitch_rmse_hz\n";
  for (size_t i = 0; i < sentences.size(); ++i) {
    const SessionConfig cfg = make_session_config(opt, opt.seed + i);
    const SessionResult full = engine.run_full_sentence(sentences[i], cfg);
    const PhonemeAlignment full_align =
        alignment_from_rendered(full.rendered, gamma, sample_rate);
    const PitchTrack full_pitch =
        pitch_at_alignment(full.waveform, sample_rate, full_align);

    const auto emit = [&](const std::string& mode, const SessionResult& run) {
      const PhonemeAlignment align =
          alignment_from_rendered(run.rendered, gamma, sample_rate);
      const PitchTrack pitch =
          pitch_at_alignment(run.waveform, sample_rate, align);
      os << (i + 1) << ',' << mode << ',' << opt.k1 << ',' << opt.k2 << ','
         << fmt(duration_rmse_ms(align, full_align)) << ','
         << fmt(pitch_rmse_hz(pitch, full_pitch)) << '\n';
    };
    emit("lookahead", engine.run_incremental(sentences[i], cfg));
    if (independent) emit("independent", engine.run_independent(sentences[i], cfg));
  }
  write_file(out_path, os.str());
  std::cout << "wrote " << out_path << "\n";
  return 0;
}

}  // namespace

std::vector<std::string> load_corpus(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw DomainError("cannot open corpus file: " + path);
  std::vector<std::string> sentences;
  std::string line;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    sentences.push_back(line);
  }
  if (sentences.empty()) throw EmptyInput("corpus has no sentences: " + path);
  return sentences;
}

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"Streaming incremental text-to-speech engine"};
  app.require_subcommand(1);

  CommonOptions opt;
  std::string text, corpus, mode = "incremental", playback = "simulated";
  std::string out = "out.wav", schedule, policy = "lookahead";
  double rate = 1.0;
  bool independent = false;

  CLI::App* synth = app.add_subcommand("synth", "Synthesize audio + timeline");
  add_common(synth, opt);
  CLI::Option* synth_text = synth->add_option("--text", text, "Sentence to synthesize");
  CLI::Option* synth_corpus =
      synth->add_option("--corpus", corpus, "Corpus file, one sentence per line");
  synth_text->excludes(synth_corpus);
  synth->add_option("--mode", mode, "full or incremental")
      ->check(CLI::IsMember({"full", "incremental"}));
  synth->add_option("--playback", playback, "simulated or wall")
      ->check(CLI::IsMember({"simulated", "wall"}));
  synth->add_option("--out", out, "Output WAV path (or directory for --corpus)");

  CLI::App* bench = app.add_subcommand(
      "bench-latency", "Latency report over a corpus, full vs incremental");
  add_common(bench, opt);
  bench->add_option("--corpus", corpus, "Corpus file")->required();
  bench->add_option("--out", out, "Report CSV path")->required();

  CLI::App* shadow = app.add_subcommand(
      "shadow", "Latency report with incrementally arriving input");
  add_common(shadow, opt);
  shadow->add_option("--corpus", corpus, "Corpus file")->required();
  shadow->add_option("--schedule", schedule,
                     "Arrival CSV: sentence_id,chunk_index,arrival_seconds");
  shadow->add_option("--rate", rate, "Auto-schedule pace factor");
  shadow->add_option("--policy", policy, "lookahead or full")
      ->check(CLI::IsMember({"lookahead", "full"}));
  shadow->add_option("--out", out, "Report CSV path")->required();

  CLI::App* prosody = app.add_subcommand(
      "prosody", "Duration/pitch deviation against full-sentence synthesis");
  add_common(prosody, opt);
  prosody->add_option("--corpus", corpus, "Corpus file")->required();
  prosody->add_flag("--independent", independent,
                    "Also score per-chunk synthesis without context");
  prosody->add_option("--out", out, "Prosody CSV path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (synth->parsed()) {
      if (text.empty() && corpus.empty()) {
        std::cerr << "synth: one of --text or --corpus is required\n";
        return 1;
      }
      return cmd_synth(opt, text, corpus, mode, playback, out);
    }
    if (bench->parsed()) return cmd_bench_latency(opt, corpus, out);
    if (shadow->parsed()) return cmd_shadow(opt, corpus, schedule, rate, policy, out);
    if (prosody->parsed()) return cmd_prosody(opt, corpus, independent, out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}

}  // namespace itts
