#ifndef ITTS_FRONTEND_HPP
#define ITTS_FRONTEND_HPP

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

namespace itts {

// A word as a phoneme sequence. The phoneme list is never empty.
struct PhonemeWord {
  std::string surface;
  std::vector<std::string> phonemes;
};

// A run of consecutive words scheduled as one synthesis unit.
struct Chunk {
  std::vector<PhonemeWord> words;
  int64_t phoneme_count = 0;
};

// Pronunciation dictionary with per-character fallback rules.
//
// File format (UTF-8, one entry per line):
//   word<TAB>PH1 PH2 ...
// Lines starting with '#' are comments. A line consisting of exactly
// "#rules" switches to the fallback-rule section, whose entries use the
// same syntax with single-character keys.
class Lexicon {
 public:
  static Lexicon load(const std::string& path);

  // Keys are lowercased; empty phoneme sequences are rejected.
  void add_entry(const std::string& word, std::vector<std::string> phonemes);
  void add_rule(const std::string& character, std::vector<std::string> phonemes);

  // nullptr on miss. Lookup is case-insensitive.
  const std::vector<std::string>* find(const std::string& word) const;
  const std::vector<std::string>* find_rule(const std::string& character) const;

  size_t entry_count() const { return entries_.size(); }
  size_t rule_count() const { return rules_.size(); }

 private:
  std::unordered_map<std::string, std::vector<std::string>> entries_;
  std::unordered_map<std::string, std::vector<std::string>> rules_;
};

// Lowercases, strips punctuation to separators (apostrophes are kept inside
// tokens), collapses whitespace. Idempotent. Throws EmptyInput when nothing
// survives.
std::string normalize_text(const std::string& raw);

// Whitespace split of normalize_text output; never produces empty tokens.
std::vector<std::string> segment_words(const std::string& normalized);

// Lexicon hit or per-character rule concatenation. Throws UnknownSymbol when
// a character has no fallback rule.
PhonemeWord to_phonemes(const std::string& word, const Lexicon& lex);

// Greedy left-to-right grouping: each chunk takes the minimum number of words
// whose phonemes total at least min_phonemes; a short sentence-final
// remainder becomes its own chunk.
std::vector<Chunk> chunk_words(const std::vector<PhonemeWord>& words,
                               int64_t min_phonemes);

}  // namespace itts

#endif  // ITTS_FRONTEND_HPP
