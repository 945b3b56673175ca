#include "privlens/text_metrics.hpp"

#include <cmath>
#include <set>
#include <stdexcept>
#include <unordered_set>

#include "privlens/error.hpp"
#include "privlens/porter.hpp"
#include "privlens/stats.hpp"

namespace privlens {

namespace {

bool is_vowel(char c) {
  return c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u' || c == 'y';
}

bool ends_with(std::string_view s, std::string_view suffix) {
  return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

bool has_letter(std::string_view s) {
  for (char c : s)
    if ((c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z')) return true;
  return false;
}

bool starts_upper(std::string_view s) {
  for (char c : s) {
    if (c >= 'A' && c <= 'Z') return true;
    if ((c >= 'a' && c <= 'z') || (c >= '0' && c <= '9')) return false;
  }
  return false;
}

// Letters plus non-ASCII code points (counted once per lead byte).
long letter_chars(std::string_view token) {
  long n = 0;
  for (char c : token) {
    auto b = static_cast<unsigned char>(c);
    if ((c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z')) ++n;
    else if (b >= 0xC0) ++n;
  }
  return n;
}

long non_space_non_punct_chars(std::string_view text) {
  long n = 0;
  for (char c : text) {
    auto b = static_cast<unsigned char>(c);
    if (b >= 0x80) {
      if (b >= 0xC0) ++n;
      continue;
    }
    if ((c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9')) ++n;
  }
  return n;
}

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s)
    if ((c < '0' || c > '9') && c != ',') return false;
  return true;
}

long digit_count(std::string_view s) {
  long n = 0;
  for (char c : s) n += (c >= '0' && c <= '9');
  return n;
}

std::string strip_possessive(std::string w) {
  if (ends_with(w, "'s")) w.resize(w.size() - 2);
  else if (ends_with(w, "'")) w.pop_back();
  return w;
}

bool doubled_consonant_end(std::string_view s) {
  return s.size() >= 2 && s[s.size() - 1] == s[s.size() - 2] && !is_vowel(s.back());
}

// Regular inflections of a listed word are familiar.
bool familiar(const std::string& w, const WordSet& list) {
  auto in = [&](std::string_view s) { return !s.empty() && list.count(std::string(s)) > 0; };
  if (in(w)) return true;
  std::string_view v(w);
  if (ends_with(v, "ies") && in(std::string(v.substr(0, v.size() - 3)) + "y")) return true;
  if (ends_with(v, "es") && in(v.substr(0, v.size() - 2))) return true;
  if (ends_with(v, "s") && in(v.substr(0, v.size() - 1))) return true;
  if (ends_with(v, "ied") && in(std::string(v.substr(0, v.size() - 3)) + "y")) return true;
  if (ends_with(v, "ed")) {
    auto stem = v.substr(0, v.size() - 2);
    if (in(stem)) return true;
    if (doubled_consonant_end(stem) && in(stem.substr(0, stem.size() - 1))) return true;
  }
  if (ends_with(v, "d") && in(v.substr(0, v.size() - 1))) return true;
  if (ends_with(v, "ing")) {
    auto stem = v.substr(0, v.size() - 3);
    if (in(stem) || in(std::string(stem) + "e")) return true;
    if (doubled_consonant_end(stem) && in(stem.substr(0, stem.size() - 1))) return true;
  }
  return false;
}

struct SentenceTokens {
  std::vector<std::vector<std::string>> sentences;
};

SentenceTokens tokenize_sentences(std::string_view text, SentenceStrategy strategy) {
  SentenceTokens out;
  for (const auto& s : split_sentences(text, strategy)) out.sentences.push_back(word_tokens(s));
  return out;
}

std::string strip_gf_suffix(const std::string& w) {
  for (std::string_view suf : {"ing", "es", "ed"}) {
    if (ends_with(w, suf) && w.size() > suf.size() + 2) return w.substr(0, w.size() - suf.size());
  }
  return w;
}

long complex_words_in(const SentenceTokens& st, const CountingConfig& config) {
  long n = 0;
  for (const auto& sent : st.sentences) {
    for (std::size_t i = 0; i < sent.size(); ++i) {
      const auto& tok = sent[i];
      if (!has_letter(tok)) continue;
      if (i > 0 && starts_upper(tok)) continue;  // proper name
      std::string lw = strip_gf_suffix(letters_lower(strip_possessive(tok)));
      if (syllables(lw, config) >= 3) ++n;
    }
  }
  return n;
}

long difficult_words_in(const SentenceTokens& st, const WordSet& list) {
  long n = 0;
  long index = 0;
  std::set<std::pair<long, std::string>> names_seen;
  for (const auto& sent : st.sentences) {
    for (std::size_t i = 0; i < sent.size(); ++i, ++index) {
      const auto& tok = sent[i];
      if (all_digits(tok)) {
        if (digit_count(tok) > 4) ++n;
        continue;
      }
      std::string lw = strip_possessive(to_lower(tok));
      std::string letters = letters_lower(lw);
      if (letters.empty()) continue;
      if (familiar(lw, list) || familiar(letters, list)) continue;
      if (i > 0 && starts_upper(tok)) {
        if (names_seen.insert({index / 100, letters}).second) ++n;
        continue;
      }
      ++n;
    }
  }
  return n;
}

}  // namespace

int vowel_group_syllables(std::string_view word) {
  std::string w = letters_lower(word);
  if (w.empty()) return 0;
  int groups = 0;
  bool prev_vowel = false;
  for (char c : w) {
    bool v = is_vowel(c);
    if (v && !prev_vowel) ++groups;
    prev_vowel = v;
  }
  const std::size_t n = w.size();
  auto lone_e_at = [&](std::size_t pos) {
    return w[pos] == 'e' && pos > 0 && !is_vowel(w[pos - 1]);
  };
  bool silent = false;
  if (w.back() == 'e' && lone_e_at(n - 1)) {
    silent = !ends_with(w, "le") || (n >= 3 && is_vowel(w[n - 3]));
  } else if (n >= 3 && (ends_with(w, "es") || ends_with(w, "ed")) && lone_e_at(n - 2)) {
    char before = w[n - 3];
    bool consonant_le = n >= 4 && w[n - 3] == 'l' && !is_vowel(w[n - 4]);
    if (ends_with(w, "es")) {
      bool sibilant = before == 's' || before == 'x' || before == 'z' || before == 'c' ||
                      before == 'g' || ends_with(w, "ches") || ends_with(w, "shes");
      silent = !sibilant && !consonant_le;
    } else {
      silent = before != 't' && before != 'd' && !consonant_le;
    }
  }
  if (silent && groups > 1) --groups;
  return groups < 1 ? 1 : groups;
}

int syllables(std::string_view word, const CountingConfig& config) {
  if (config.syllable_strategy == SyllableStrategy::hyphenation_dict && config.hyphenation) {
    int s = config.hyphenation->syllables(letters_lower(word));
    if (s > 0) return s;
  }
  return vowel_group_syllables(word);
}

TextCounts count(std::string_view text, const CountingConfig& config) {
  if (text.empty()) throw std::invalid_argument("count: empty text");
  TextCounts c;
  auto sentence_tokens = tokenize_sentences(text, SentenceStrategy::tokenizer);

  std::vector<std::string> words = config.word_strategy == WordStrategy::whitespace_split
                                       ? whitespace_split(text)
                                       : word_tokens(text);
  c.words = static_cast<long>(words.size());

  if (config.sentence_strategy == SentenceStrategy::tokenizer) {
    c.sentences = static_cast<long>(sentence_tokens.sentences.size());
  } else {
    c.sentences = static_cast<long>(split_sentences(text, config.sentence_strategy).size());
  }
  if (c.sentences == 0 && c.words > 0) c.sentences = 1;

  for (const auto& w : words) {
    if (!has_letter(w)) continue;
    int s = syllables(w, config);
    c.syllables += s;
    if (s >= 3) ++c.polysyllables;
    if (config.character_strategy == CharacterStrategy::per_word_no_punct_no_digits)
      c.characters += letter_chars(w);
  }
  if (config.character_strategy == CharacterStrategy::full_text_no_punct_no_space)
    c.characters = non_space_non_punct_chars(text);

  c.complex_words = complex_words_in(sentence_tokens, config);
  if (config.familiar_words) c.difficult_words = difficult_words_in(sentence_tokens, *config.familiar_words);
  return c;
}

double smog_score(long polysyllables, long sentences) {
  if (sentences <= 0) throw UndefinedInputError("SMOG needs at least one sentence");
  return 1.0430 * std::sqrt(static_cast<double>(polysyllables) * 30.0 / static_cast<double>(sentences)) +
         3.1291;
}

ReadabilityScores readability(const TextCounts& c, const ReadabilityOptions& options) {
  if (c.words <= 0 || c.sentences <= 0)
    throw UndefinedInputError("readability formulas need words > 0 and sentences > 0");
  const double words = static_cast<double>(c.words);
  const double sentences = static_cast<double>(c.sentences);
  const double wps = words / sentences;
  const double spw = static_cast<double>(c.syllables) / words;
  const double cpw = static_cast<double>(c.characters) / words;

  ReadabilityScores r;
  r.fre = 206.835 - 1.015 * wps - 84.6 * spw;
  r.fkg = 0.39 * wps + 11.8 * spw - 15.59;
  r.ari = 4.71 * cpw + 0.5 * wps - 21.43;
  r.cl = 5.88 * cpw - 29.6 * (sentences / words) - 15.8;
  r.smog_valid = c.sentences >= 30;
  if (r.smog_valid || options.force_smog) r.smog = smog_score(c.polysyllables, c.sentences);
  if (options.dale_chall)
    r.dc = 0.1579 * (static_cast<double>(c.difficult_words) / words * 100.0) + 0.0496 * wps;
  r.gf = 0.4 * (wps + 100.0 * (static_cast<double>(c.complex_words) / words));
  return r;
}

long count_difficult_words(std::string_view text, const WordSet& familiar_list) {
  if (familiar_list.empty()) throw ConfigError("familiar word list is empty");
  return difficult_words_in(tokenize_sentences(text, SentenceStrategy::tokenizer), familiar_list);
}

long count_complex_words(std::string_view text, const CountingConfig& config) {
  return complex_words_in(tokenize_sentences(text, SentenceStrategy::tokenizer), config);
}

std::vector<std::string> preprocess_tokens(std::string_view text, const WordSet& stop_words) {
  std::string cleaned;
  cleaned.reserve(text.size());
  for (char c : text) {
    if (c >= 'A' && c <= 'Z') cleaned += static_cast<char>(c - 'A' + 'a');
    else if (c >= 'a' && c <= 'z') cleaned += c;
    else cleaned += ' ';
  }
  std::vector<std::string> out;
  for (auto& tok : whitespace_split(cleaned)) {
    if (stop_words.count(tok)) continue;
    out.push_back(porter_stem(tok));
  }
  return out;
}

ObfuscationStats obfuscation(std::string_view text, std::span<const std::string> obfuscating_list,
                             const WordSet& stop_words) {
  if (obfuscating_list.empty()) throw std::invalid_argument("obfuscation: empty word list");
  std::unordered_set<std::string> single;
  std::vector<std::vector<std::string>> phrases;
  for (const auto& entry : obfuscating_list) {
    auto toks = preprocess_tokens(entry, stop_words);
    if (toks.size() == 1) single.insert(toks[0]);
    else if (toks.size() > 1) phrases.push_back(std::move(toks));
  }
  ObfuscationStats st;
  auto sentences = split_sentences(text, SentenceStrategy::tokenizer);
  if (sentences.empty()) return st;
  long hit_sentences = 0;
  for (const auto& s : sentences) {
    auto toks = preprocess_tokens(s, stop_words);
    long hits = 0;
    for (std::size_t i = 0; i < toks.size();) {
      std::size_t matched = 0;
      for (const auto& p : phrases) {
        if (p.size() > matched && i + p.size() <= toks.size() &&
            std::equal(p.begin(), p.end(), toks.begin() + static_cast<long>(i)))
          matched = p.size();
      }
      if (matched == 0 && single.count(toks[i])) matched = 1;
      if (matched) {
        ++hits;
        i += matched;
      } else {
        ++i;
      }
    }
    st.obfuscating_word_count += hits;
    if (hits > 0) ++hit_sentences;
  }
  st.sentences_with_obfuscating_fraction =
      static_cast<double>(hit_sentences) / static_cast<double>(sentences.size());
  return st;
}

namespace {

const std::unordered_set<std::string>& be_forms() {
  static const std::unordered_set<std::string> k = {"am",   "is",   "are",  "was",
                                                    "were", "be",   "been", "being"};
  return k;
}

const std::unordered_set<std::string>& not_participles() {
  static const std::unordered_set<std::string> k = {
      "need", "seed", "feed", "indeed", "speed", "embed", "shed", "bed", "red", "breed",
      "greed", "hundred", "naked", "sacred", "wicked", "bred", "sled", "wed", "fled"};
  return k;
}

bool is_participle(const std::string& w, const WordSet& irregular) {
  if (irregular.count(w)) return true;
  return w.size() >= 4 && ends_with(w, "ed") && !not_participles().count(w);
}

bool is_skippable(const std::string& w) {
  return default_passive_skip_words().count(w) || (w.size() > 3 && ends_with(w, "ly"));
}

}  // namespace

bool is_passive_sentence(std::string_view sentence, const WordSet& irregular) {
  std::vector<std::string> toks;
  for (const auto& t : word_tokens(sentence)) toks.push_back(letters_lower(t));
  for (std::size_t i = 0; i < toks.size(); ++i) {
    if (!be_forms().count(toks[i])) continue;
    int consumed = 0;
    for (std::size_t j = i + 1; j < toks.size() && consumed < 3; ++j) {
      if (is_participle(toks[j], irregular)) return true;
      if (is_skippable(toks[j])) continue;
      ++consumed;
    }
  }
  return false;
}

PassiveStats passive_fraction(std::string_view text, const WordSet& irregular) {
  PassiveStats st;
  auto sentences = split_sentences(text, SentenceStrategy::tokenizer);
  st.sentences = static_cast<long>(sentences.size());
  for (const auto& s : sentences) st.passive_sentences += is_passive_sentence(s, irregular);
  st.passive_sentence_fraction =
      st.sentences == 0 ? 0.0 : static_cast<double>(st.passive_sentences) / static_cast<double>(st.sentences);
  return st;
}

double time_to_read(double words) {
  if (words < 0) throw std::invalid_argument("time_to_read: negative word count");
  return words / kReadingWordsPerMinute;
}

double annual_reading_hours(double mean_policy_words) {
  if (mean_policy_words < 0) throw std::invalid_argument("annual_reading_hours: negative mean");
  return kSitesVisitedPerYear * (mean_policy_words / kReadingWordsPerMinute) / 60.0;
}

double spearman_rank_corr(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("spearman: length mismatch");
  if (a.size() < 2) throw std::invalid_argument("spearman: need at least two observations");
  auto ra = average_ranks(a);
  auto rb = average_ranks(b);
  return pearson(ra, rb);
}

}  // namespace privlens
