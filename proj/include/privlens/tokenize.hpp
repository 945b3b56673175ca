#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace privlens {

enum class SentenceStrategy {
  // Terminal punctuation followed by whitespace, abbreviation-aware; a line
  // without terminal punctuation (a heading) is a sentence of its own.
  tokenizer,
  // Terminal punctuation + whitespace + capital letter; newlines are not
  // boundaries and pieces with fewer than three words are dropped.
  regex,
};

std::vector<std::string> whitespace_split(std::string_view text);

// Splits on whitespace, then peels leading/trailing punctuation into separate
// tokens. Internal apostrophes, hyphens and periods stay ("don't", "opt-out",
// "e.g."). Whitespace never appears in the output.
std::vector<std::string> tokenize_words(std::string_view text);

// Token holds at least one ASCII letter or digit (or a non-ASCII byte).
bool is_word_token(std::string_view token);

// Word tokens only, i.e. tokenize_words() filtered by is_word_token().
std::vector<std::string> word_tokens(std::string_view text);

std::vector<std::string> split_sentences(std::string_view text,
                                         SentenceStrategy strategy = SentenceStrategy::tokenizer);

std::string to_lower(std::string_view s);

// Letters only, lowercased ("Policy's" -> "policys").
std::string letters_lower(std::string_view token);

// Collapse whitespace runs to one space and trim.
std::string collapse_whitespace(std::string_view s);

}  // namespace privlens
