#pragma once

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace privlens {

struct PolicyLink {
  std::string href;
  std::string anchor_text;
  std::string matched_term;
  bool is_pdf = false;  // recorded but never fetched
};

// Landing-page search terms, highest priority first.
const std::vector<std::string>& policy_link_terms();

// For each term in priority order, anchors are scanned last-to-first and
// matched case-insensitively against anchor text, title attribute and URL
// (URL separators such as '-', '_', '/' read as spaces). A link is reported
// once, under the first term it matches.
std::vector<PolicyLink> find_policy_links(std::string_view html);

// Links on a policy page that point at a longer version of it. Matches
// anchor text and title only.
std::vector<PolicyLink> find_full_policy_links(std::string_view policy_html);

bool is_pdf_href(std::string_view href);

// Reader-mode style: scores containers by paragraph text and commas,
// penalised by link density and boilerplate class/id names.
std::string extract_density(std::string_view html);
// Strips nav/header/footer/aside/script/style and menu-like blocks.
std::string extract_pruned(std::string_view html);
// Longer of the two by character count.
std::string extract_main_text(std::string_view html);

struct LanguageGuess {
  std::string language;  // ISO 639-1, "und" when nothing matched
  double score = 0.0;    // share of tokens that are stopwords of `language`
  bool confident = false;
};
LanguageGuess detect_language(std::string_view text);

struct PolicyClassifier {
  std::function<double(std::string_view)> probability;
  double threshold = 0.5;
};

struct GateVerdict {
  std::string language;
  bool language_confident = false;
  std::size_t word_count = 0;
  std::vector<double> policy_probabilities;
  bool passed = false;
};

inline constexpr std::size_t kMinPolicyWords = 100;

GateVerdict gate(std::string_view text, const std::vector<PolicyClassifier>& classifiers,
                 std::size_t min_words = kMinPolicyWords);

}  // namespace privlens
