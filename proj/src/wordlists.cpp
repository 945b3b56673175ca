#include "privlens/wordlists.hpp"

#include <fstream>

#include "privlens/error.hpp"
#include "privlens/tokenize.hpp"

namespace privlens {

std::vector<std::string> load_word_lines(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read word list: " + path.string());
  std::vector<std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::string w = collapse_whitespace(line);
    if (!w.empty()) out.push_back(to_lower(w));
  }
  return out;
}

WordSet load_word_list(const std::filesystem::path& path) {
  auto lines = load_word_lines(path);
  return WordSet(lines.begin(), lines.end());
}

const WordSet& default_stop_words() {
  static const WordSet k = {
      "i", "me", "my", "myself", "we", "our", "ours", "ourselves", "you", "you're", "you've",
      "you'll", "you'd", "your", "yours", "yourself", "yourselves", "he", "him", "his",
      "himself", "she", "she's", "her", "hers", "herself", "it", "it's", "its", "itself",
      "they", "them", "their", "theirs", "themselves", "what", "which", "who", "whom",
      "this", "that", "that'll", "these", "those", "am", "is", "are", "was", "were", "be",
      "been", "being", "have", "has", "had", "having", "do", "does", "did", "doing", "a",
      "an", "the", "and", "but", "if", "or", "because", "as", "until", "while", "of", "at",
      "by", "for", "with", "about", "against", "between", "into", "through", "during",
      "before", "after", "above", "below", "to", "from", "up", "down", "in", "out", "on",
      "off", "over", "under", "again", "further", "then", "once", "here", "there", "when",
      "where", "why", "how", "all", "any", "both", "each", "few", "more", "most", "other",
      "some", "such", "no", "nor", "not", "only", "own", "same", "so", "than", "too",
      "very", "s", "t", "can", "will", "just", "don", "don't", "should", "should've", "now",
      "d", "ll", "m", "o", "re", "ve", "y", "ain", "aren", "aren't", "couldn", "couldn't",
      "didn", "didn't", "doesn", "doesn't", "hadn", "hadn't", "hasn", "hasn't", "haven",
      "haven't", "isn", "isn't", "ma", "mightn", "mightn't", "mustn", "mustn't", "needn",
      "needn't", "shan", "shan't", "shouldn", "shouldn't", "wasn", "wasn't", "weren",
      "weren't", "won", "won't", "wouldn", "wouldn't"};
  return k;
}

const WordSet& default_irregular_participles() {
  static const WordSet k = {
      "arisen", "awoken", "borne", "born", "beaten", "become", "begun", "bent",
      "bound", "bitten", "blown", "broken", "brought", "built", "burnt", "bought", "caught",
      "chosen", "come", "cost", "cut", "dealt", "done", "drawn", "driven", "eaten", "fallen",
      "fed", "felt", "fought", "found", "forbidden", "forgotten", "forgiven", "frozen",
      "given", "gone", "grown", "heard", "held", "hidden", "hit", "hurt", "kept", "known",
      "laid", "led", "left", "lent", "let", "lost", "made", "meant", "met", "paid", "put",
      "read", "ridden", "run", "said", "seen", "sent", "set", "shown", "shut", "sold",
      "sought", "spent", "spoken", "spread", "stolen", "struck", "sworn", "taken", "taught",
      "thought", "thrown", "told", "understood", "undertaken", "withdrawn", "won", "worn",
      "written", "overseen", "overridden", "rewritten", "withheld", "upheld", "forgone",
      "foregone", "undergone", "mistaken", "outdone", "beset", "bid", "broadcast", "forecast"};
  return k;
}

const WordSet& default_passive_skip_words() {
  static const WordSet k = {"not", "never", "also", "always", "often", "usually", "then",
                            "still", "only", "already", "just", "n't", "sometimes",
                            "generally", "typically", "further", "thus", "therefore",
                            "even", "ever", "rarely", "seldom", "being", "been", "be"};
  return k;
}

void HyphenationDict::add(const std::string& hyphenated) {
  std::string word;
  int parts = 1;
  for (char c : hyphenated) {
    if (c == '-' || c == '=' || c == '.') {
      ++parts;
    } else {
      word += c;
    }
  }
  word = letters_lower(word);
  if (!word.empty()) counts_[word] = parts;
}

HyphenationDict HyphenationDict::load(const std::filesystem::path& path) {
  HyphenationDict d;
  for (const auto& line : load_word_lines(path)) {
    // "privacy pri-va-cy" or just "pri-va-cy"
    auto space = line.rfind(' ');
    d.add(space == std::string::npos ? line : line.substr(space + 1));
  }
  return d;
}

int HyphenationDict::syllables(const std::string& lower_word) const {
  auto it = counts_.find(lower_word);
  return it == counts_.end() ? 0 : it->second;
}

}  // namespace privlens
