#include "privlens/tokenize.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <unordered_set>

namespace privlens {

namespace {

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; }
bool is_alpha(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'); }
bool is_digit(char c) { return c >= '0' && c <= '9'; }
bool is_alnum(char c) { return is_alpha(c) || is_digit(c); }
bool is_high(char c) { return static_cast<unsigned char>(c) >= 0x80; }
bool is_terminal(char c) { return c == '.' || c == '!' || c == '?'; }
bool is_closer(char c) { return c == '"' || c == '\'' || c == ')' || c == ']'; }

// Maps the common typographic code points onto ASCII so the byte-level
// scanners below see one consistent punctuation alphabet.
std::string ascii_punctuation(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (std::size_t i = 0; i < text.size(); ++i) {
    auto b = static_cast<unsigned char>(text[i]);
    if (b == 0xC2 && i + 1 < text.size() && static_cast<unsigned char>(text[i + 1]) == 0xA0) {
      out += ' ';
      ++i;
      continue;
    }
    if (b == 0xE2 && i + 2 < text.size() && static_cast<unsigned char>(text[i + 1]) == 0x80) {
      auto c = static_cast<unsigned char>(text[i + 2]);
      const char* repl = nullptr;
      switch (c) {
        case 0x93: case 0x94: repl = "-"; break;  // en/em dash
        case 0x98: case 0x99: repl = "'"; break;
        case 0x9C: case 0x9D: repl = "\""; break;
        case 0xA2: repl = "*"; break;             // bullet
        case 0xA6: repl = "..."; break;
        case 0x8B: case 0x8C: case 0x8D: repl = ""; break;  // zero-width
        default: break;
      }
      if (repl) {
        out += repl;
        i += 2;
        continue;
      }
    }
    out += text[i];
  }
  return out;
}

bool word_char(char c) { return is_alnum(c) || is_high(c); }

// Abbreviations that never end a sentence.
const std::unordered_set<std::string>& hard_abbreviations() {
  static const std::unordered_set<std::string> k = {
      "e.g", "i.e", "vs", "mr", "mrs", "ms", "dr", "prof", "st", "no", "fig", "cf",
      "approx", "dept", "jan", "feb", "mar", "apr", "jun", "jul", "aug", "sep", "sept",
      "oct", "nov", "dec", "u.s", "u.k", "e.u", "sec", "art", "para", "p", "pp", "vol"};
  return k;
}

// Abbreviations that end a sentence only when the next word is capitalised.
const std::unordered_set<std::string>& soft_abbreviations() {
  static const std::unordered_set<std::string> k = {"etc", "inc", "ltd", "co", "corp", "llc",
                                                    "jr", "sr", "al"};
  return k;
}

// The word immediately before position `dot` (exclusive), lowercased,
// without leading punctuation.
std::string word_before(std::string_view s, std::size_t dot) {
  std::size_t b = dot;
  while (b > 0 && !is_space(s[b - 1])) --b;
  std::string w(s.substr(b, dot - b));
  std::size_t lead = 0;
  while (lead < w.size() && !word_char(w[lead])) ++lead;
  return to_lower(std::string_view(w).substr(lead));
}

// Splits one logical block (no line structure) at terminal punctuation.
void split_block_tokenizer(std::string_view s, std::vector<std::string>& out) {
  std::size_t start = 0;
  std::size_t i = 0;
  auto emit = [&](std::size_t end) {
    std::string piece = collapse_whitespace(s.substr(start, end - start));
    if (std::any_of(piece.begin(), piece.end(), word_char)) out.push_back(std::move(piece));
    start = end;
  };
  while (i < s.size()) {
    if (!is_terminal(s[i])) {
      ++i;
      continue;
    }
    std::size_t dot = i;
    std::size_t j = i;
    while (j < s.size() && is_terminal(s[j])) ++j;
    while (j < s.size() && is_closer(s[j])) ++j;
    if (j < s.size() && !is_space(s[j])) {
      i = j;
      continue;
    }
    std::size_t k = j;
    while (k < s.size() && is_space(s[k])) ++k;
    if (k >= s.size()) break;
    bool boundary = true;
    if (s[dot] == '.' && j == dot + 1) {
      std::string prev = word_before(s, dot);
      char next = s[k];
      bool next_upper = next >= 'A' && next <= 'Z';
      bool single_initial = prev.size() == 1 && is_alpha(prev[0]);
      if (hard_abbreviations().count(prev) || single_initial) {
        boundary = false;
      } else if (soft_abbreviations().count(prev)) {
        boundary = next_upper;
      } else if ((next >= 'a' && next <= 'z')) {
        // lowercase continuation after a period: treat as abbreviation
        boundary = false;
      }
    }
    if (boundary) emit(j);
    i = k;
  }
  emit(s.size());
}

bool starts_lower(std::string_view line) {
  for (char c : line) {
    if (is_space(c)) continue;
    return c >= 'a' && c <= 'z';
  }
  return false;
}

std::vector<std::string> split_tokenizer(std::string_view text) {
  // Group physical lines into blocks: a line that lacks terminal punctuation
  // ends its block unless the next line continues in lowercase.
  std::vector<std::string_view> lines;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    lines.push_back(text.substr(pos, nl - pos));
    pos = nl + 1;
  }
  std::vector<std::string> out;
  std::string block;
  auto flush = [&] {
    if (!block.empty()) split_block_tokenizer(block, out);
    block.clear();
  };
  for (std::size_t li = 0; li < lines.size(); ++li) {
    std::string_view line = lines[li];
    if (std::all_of(line.begin(), line.end(), is_space)) {
      flush();
      continue;
    }
    if (!block.empty()) block += ' ';
    block += line;
    bool continues = li + 1 < lines.size() && starts_lower(lines[li + 1]);
    if (!continues) flush();
  }
  flush();
  return out;
}

std::vector<std::string> split_regex(std::string_view text) {
  // ' *[.?!]["')\]]*\s+(?=[A-Z])' with short-piece filtering.
  std::vector<std::string> pieces;
  std::size_t start = 0;
  std::size_t i = 0;
  while (i < text.size()) {
    if (!is_terminal(text[i])) {
      ++i;
      continue;
    }
    std::size_t j = i + 1;
    while (j < text.size() && is_closer(text[j])) ++j;
    std::size_t k = j;
    while (k < text.size() && is_space(text[k])) ++k;
    if (k > j && k < text.size() && text[k] >= 'A' && text[k] <= 'Z') {
      pieces.push_back(collapse_whitespace(text.substr(start, j - start)));
      start = k;
      i = k;
      continue;
    }
    i = j;
  }
  pieces.push_back(collapse_whitespace(text.substr(start)));
  std::vector<std::string> out;
  for (auto& p : pieces) {
    if (whitespace_split(p).size() >= 3) out.push_back(std::move(p));
  }
  return out;
}

}  // namespace

std::string to_lower(std::string_view s) {
  std::string out(s);
  for (char& c : out)
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  return out;
}

std::string letters_lower(std::string_view token) {
  std::string out;
  out.reserve(token.size());
  for (char c : token) {
    if (c >= 'A' && c <= 'Z')
      out += static_cast<char>(c - 'A' + 'a');
    else if (c >= 'a' && c <= 'z')
      out += c;
  }
  return out;
}

std::string collapse_whitespace(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  bool pending = false;
  for (char c : s) {
    if (is_space(c)) {
      pending = !out.empty();
      continue;
    }
    if (pending) out += ' ';
    pending = false;
    out += c;
  }
  return out;
}

std::vector<std::string> whitespace_split(std::string_view text) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && is_space(text[i])) ++i;
    std::size_t b = i;
    while (i < text.size() && !is_space(text[i])) ++i;
    if (i > b) out.emplace_back(text.substr(b, i - b));
  }
  return out;
}

std::vector<std::string> tokenize_words(std::string_view raw) {
  std::string text = ascii_punctuation(raw);
  std::vector<std::string> out;
  for (const std::string& chunk : whitespace_split(text)) {
    std::size_t b = 0;
    std::size_t e = chunk.size();
    while (b < e && !word_char(chunk[b])) {
      out.emplace_back(1, chunk[b]);
      ++b;
    }
    std::vector<std::string> tail;
    while (e > b && !word_char(chunk[e - 1])) {
      // keep the period of a dotted abbreviation such as "e.g."
      if (chunk[e - 1] == '.' && e - b >= 3 && chunk[e - 3] == '.' && word_char(chunk[e - 2]))
        break;
      tail.emplace_back(1, chunk[e - 1]);
      --e;
    }
    if (e > b) out.emplace_back(chunk.substr(b, e - b));
    for (auto it = tail.rbegin(); it != tail.rend(); ++it) out.push_back(*it);
  }
  return out;
}

bool is_word_token(std::string_view token) {
  return std::any_of(token.begin(), token.end(), word_char);
}

std::vector<std::string> word_tokens(std::string_view text) {
  std::vector<std::string> out;
  for (auto& t : tokenize_words(text))
    if (is_word_token(t)) out.push_back(std::move(t));
  return out;
}

std::vector<std::string> split_sentences(std::string_view raw, SentenceStrategy strategy) {
  std::string text = ascii_punctuation(raw);
  return strategy == SentenceStrategy::regex ? split_regex(text) : split_tokenizer(text);
}

}  // namespace privlens
