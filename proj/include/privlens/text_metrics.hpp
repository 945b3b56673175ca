#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "privlens/tokenize.hpp"
#include "privlens/wordlists.hpp"

namespace privlens {

enum class WordStrategy { whitespace_split, tokenizer };
enum class SyllableStrategy { vowel_groups, hyphenation_dict };
enum class CharacterStrategy { per_word_no_punct_no_digits, full_text_no_punct_no_space };

// Selects one variant per count. The default-constructed value is the
// canonical configuration; the other variants exist so counting choices can
// be compared against each other.
struct CountingConfig {
  WordStrategy word_strategy = WordStrategy::tokenizer;
  SentenceStrategy sentence_strategy = SentenceStrategy::tokenizer;
  SyllableStrategy syllable_strategy = SyllableStrategy::vowel_groups;
  CharacterStrategy character_strategy = CharacterStrategy::per_word_no_punct_no_digits;

  // Required by SyllableStrategy::hyphenation_dict; unknown words fall back
  // to vowel groups.
  std::shared_ptr<const HyphenationDict> hyphenation;
  // When set, count() also fills TextCounts::difficult_words.
  std::shared_ptr<const WordSet> familiar_words;
};

struct TextCounts {
  long words = 0;
  long sentences = 0;
  long syllables = 0;
  long characters = 0;
  long polysyllables = 0;
  long difficult_words = 0;
  long complex_words = 0;
};

struct ReadabilityScores {
  double fre = 0;
  double fkg = 0;
  double ari = 0;
  double cl = 0;
  // Absent when sentences < 30 unless forced; smog_valid records whether the
  // text met the 30-sentence requirement.
  std::optional<double> smog;
  bool smog_valid = false;
  std::optional<double> dc;
  double gf = 0;
};

struct ReadabilityOptions {
  bool force_smog = false;
  bool dale_chall = false;
};

struct ObfuscationStats {
  long obfuscating_word_count = 0;
  double sentences_with_obfuscating_fraction = 0;
};

struct PassiveStats {
  long passive_sentences = 0;
  long sentences = 0;
  double passive_sentence_fraction = 0;
};

// Syllables in one word under the vowel-group heuristic: runs of a/e/i/o/u/y
// count once; a silent final "e" (also in "-es"/"-ed" after a consonant
// that does not re-voice it) is dropped unless the word ends in "le"; at
// least one syllable.
int vowel_group_syllables(std::string_view word);

int syllables(std::string_view word, const CountingConfig& config);

// Throws std::invalid_argument on empty text.
TextCounts count(std::string_view text, const CountingConfig& config = {});

// Throws UndefinedInputError when words or sentences is zero.
ReadabilityScores readability(const TextCounts& counts, const ReadabilityOptions& options = {});

double smog_score(long polysyllables, long sentences);

// Dale-Chall difficult words with the list's exemption rules.
long count_difficult_words(std::string_view text, const WordSet& familiar_list);

// Gunning-Fog complex words: 3+ syllables once -es/-ed/-ing is stripped,
// proper names excluded.
long count_complex_words(std::string_view text, const CountingConfig& config = {});

// Lowercase, strip punctuation and digits, drop stop words, Porter-stem.
std::vector<std::string> preprocess_tokens(std::string_view text,
                                           const WordSet& stop_words = default_stop_words());

ObfuscationStats obfuscation(std::string_view text, std::span<const std::string> obfuscating_list,
                             const WordSet& stop_words = default_stop_words());

PassiveStats passive_fraction(std::string_view text,
                              const WordSet& irregular = default_irregular_participles());
bool is_passive_sentence(std::string_view sentence,
                         const WordSet& irregular = default_irregular_participles());

inline constexpr double kReadingWordsPerMinute = 250.0;
inline constexpr double kSitesVisitedPerYear = 1462.0;

double time_to_read(double words);
double annual_reading_hours(double mean_policy_words);

// Spearman's rho with average ranks for ties. Throws std::invalid_argument
// on length mismatch or fewer than two observations, UndefinedInputError if
// either side has constant ranks.
double spearman_rank_corr(std::span<const double> a, std::span<const double> b);

}  // namespace privlens
