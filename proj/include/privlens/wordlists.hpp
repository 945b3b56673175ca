#pragma once

#include <filesystem>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace privlens {

using WordSet = std::unordered_set<std::string>;

// One token per line, UTF-8, '#' starts a comment, blank lines ignored.
// Entries are lowercased. Throws ConfigError if the file cannot be read.
WordSet load_word_list(const std::filesystem::path& path);
std::vector<std::string> load_word_lines(const std::filesystem::path& path);

// Fixed English stop-word list used by the obfuscation preprocessor.
const WordSet& default_stop_words();

// Irregular past participles recognised by the passive-voice matcher.
const WordSet& default_irregular_participles();

// Adverbs the passive matcher skips between a form of "to be" and a participle
// (any token ending in "-ly" is also treated as an adverb).
const WordSet& default_passive_skip_words();

// Word -> syllable count, built from a file of hyphenated words ("pri-va-cy").
class HyphenationDict {
 public:
  HyphenationDict() = default;
  static HyphenationDict load(const std::filesystem::path& path);
  void add(const std::string& hyphenated);
  // 0 when the word is unknown.
  int syllables(const std::string& lower_word) const;
  std::size_t size() const { return counts_.size(); }

 private:
  std::unordered_map<std::string, int> counts_;
};

}  // namespace privlens
