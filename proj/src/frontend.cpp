#include "itts/frontend.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

#include "itts/errors.hpp"

namespace itts {

namespace {

std::string to_lower_ascii(const std::string& s) {
  std::string out = s;
  for (char& c : out) {
    c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  return out;
}

std::vector<std::string> split_phonemes(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream iss(s);
  std::string tok;
  while (iss >> tok) out.push_back(tok);
  return out;
}

// Splits a UTF-8 string into code-point substrings. Invalid continuation
// bytes are passed through one byte at a time.
std::vector<std::string> utf8_units(const std::string& s) {
  std::vector<std::string> out;
  size_t i = 0;
  while (i < s.size()) {
    unsigned char c = static_cast<unsigned char>(s[i]);
    size_t len = 1;
    if ((c & 0xE0) == 0xC0) len = 2;
    else if ((c & 0xF0) == 0xE0) len = 3;
    else if ((c & 0xF8) == 0xF0) len = 4;
    if (i + len > s.size()) len = 1;
    out.push_back(s.substr(i, len));
    i += len;
  }
  return out;
}

}  // namespace

Lexicon Lexicon::load(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw DomainError("cannot open lexicon file: " + path);
  Lexicon lex;
  std::string line;
  int lineno = 0;
  bool in_rules = false;
  while (std::getline(is, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line == "#rules") {
      in_rules = true;
      continue;
    }
    if (line[0] == '#') continue;
    size_t tab = line.find('\t');
    if (tab == std::string::npos) {
      throw DomainError("lexicon line " + std::to_string(lineno) +
                        ": missing tab separator");
    }
    std::string key = line.substr(0, tab);
    std::vector<std::string> phones = split_phonemes(line.substr(tab + 1));
    if (key.empty() || phones.empty()) {
      throw DomainError("lexicon line " + std::to_string(lineno) +
                        ": empty key or phoneme list");
    }
    if (in_rules) {
      lex.add_rule(key, std::move(phones));
    } else {
      lex.add_entry(key, std::move(phones));
    }
  }
  return lex;
}

void Lexicon::add_entry(const std::string& word,
                        std::vector<std::string> phonemes) {
  if (phonemes.empty()) throw DomainError("empty phoneme sequence for: " + word);
  entries_[to_lower_ascii(word)] = std::move(phonemes);
}

void Lexicon::add_rule(const std::string& character,
                       std::vector<std::string> phonemes) {
  if (phonemes.empty()) {
    throw DomainError("empty phoneme sequence for rule: " + character);
  }
  rules_[to_lower_ascii(character)] = std::move(phonemes);
}

const std::vector<std::string>* Lexicon::find(const std::string& word) const {
  auto it = entries_.find(to_lower_ascii(word));
  return it == entries_.end() ? nullptr : &it->second;
}

const std::vector<std::string>* Lexicon::find_rule(
    const std::string& character) const {
  auto it = rules_.find(to_lower_ascii(character));
  return it == rules_.end() ? nullptr : &it->second;
}

std::string normalize_text(const std::string& raw) {
  // Pass 1: lowercase, map punctuation (everything ASCII that is not
  // alphanumeric or an apostrophe) to a separator. Bytes >= 0x80 are kept;
  // unknown scripts surface later as UnknownSymbol with a precise message.
  std::string mapped;
  mapped.reserve(raw.size());
  for (unsigned char c : raw) {
    if (c >= 0x80) {
      mapped.push_back(static_cast<char>(c));
    } else if (std::isalnum(c) || c == '\'') {
      mapped.push_back(static_cast<char>(std::tolower(c)));
    } else {
      mapped.push_back(' ');
    }
  }
  // Pass 2: split, strip edge apostrophes so they only survive inside tokens,
  // re-join with single spaces.
  std::istringstream iss(mapped);
  std::string tok;
  std::string out;
  while (iss >> tok) {
    size_t begin = tok.find_first_not_of('\'');
    if (begin == std::string::npos) continue;  // token was all apostrophes
    size_t end = tok.find_last_not_of('\'');
    tok = tok.substr(begin, end - begin + 1);
    if (!out.empty()) out.push_back(' ');
    out += tok;
  }
  if (out.empty()) throw EmptyInput("no words after normalization");
  return out;
}

std::vector<std::string> segment_words(const std::string& normalized) {
  std::vector<std::string> words;
  std::istringstream iss(normalized);
  std::string tok;
  while (iss >> tok) words.push_back(tok);
  return words;
}

PhonemeWord to_phonemes(const std::string& word, const Lexicon& lex) {
  if (word.empty()) throw DomainError("to_phonemes: empty word");
  if (const auto* phones = lex.find(word)) {
    return PhonemeWord{word, *phones};
  }
  PhonemeWord out{word, {}};
  for (const std::string& unit : utf8_units(to_lower_ascii(word))) {
    const auto* rule = lex.find_rule(unit);
    if (!rule) {
      throw UnknownSymbol("no pronunciation rule for '" + unit + "' in word '" +
                          word + "'");
    }
    out.phonemes.insert(out.phonemes.end(), rule->begin(), rule->end());
  }
  if (out.phonemes.empty()) throw DomainError("to_phonemes: empty result");
  return out;
}

std::vector<Chunk> chunk_words(const std::vector<PhonemeWord>& words,
                               int64_t min_phonemes) {
  if (min_phonemes < 1) throw DomainError("chunk_words: min_phonemes must be >= 1");
  if (words.empty()) throw DomainError("chunk_words: empty word sequence");
  std::vector<Chunk> chunks;
  Chunk cur;
  for (const PhonemeWord& w : words) {
    cur.words.push_back(w);
    cur.phoneme_count += static_cast<int64_t>(w.phonemes.size());
    if (cur.phoneme_count >= min_phonemes) {
      chunks.push_back(std::move(cur));
      cur = Chunk{};
    }
  }
  if (!cur.words.empty()) chunks.push_back(std::move(cur));  // short remainder
  return chunks;
}

}  // namespace itts
