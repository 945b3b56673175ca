#include "privlens/extraction.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <unordered_map>
#include <unordered_set>

#include "privlens/html.hpp"
#include "privlens/tokenize.hpp"

namespace privlens {

namespace {

using html::Node;

std::string url_words(std::string_view href) {
  std::string out = to_lower(href);
  for (char& c : out)
    if (c == '-' || c == '_' || c == '/' || c == '.' || c == '+' || c == '=' || c == '?' ||
        c == '&' || c == '#')
      c = ' ';
  // "%20"
  std::size_t p;
  while ((p = out.find("%20")) != std::string::npos) out.replace(p, 3, " ");
  return collapse_whitespace(out);
}

bool contains(std::string_view hay, std::string_view needle) {
  return hay.find(needle) != std::string_view::npos;
}

PolicyLink make_link(const html::Anchor& a, std::string term) {
  return {a.href, a.text, std::move(term), is_pdf_href(a.href)};
}

// Tokens of the lowercased class and id attributes.
std::vector<std::string> class_tokens(const Node& n) {
  std::vector<std::string> out;
  std::string s = to_lower(n.attr("class") + " " + n.attr("id"));
  std::string cur;
  for (char c : s) {
    if (std::isalnum(static_cast<unsigned char>(c))) {
      cur += c;
    } else if (!cur.empty()) {
      out.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

bool token_hit(const std::vector<std::string>& tokens, std::initializer_list<std::string_view> pats) {
  for (const auto& t : tokens)
    for (auto p : pats)
      if (t.size() >= p.size() &&
          (t.compare(0, p.size(), p) == 0 || t.compare(t.size() - p.size(), p.size(), p) == 0))
        return true;
  return false;
}

bool boilerplate_class(const Node& n) {
  auto toks = class_tokens(n);
  return token_hit(toks, {"nav", "navbar", "navigation", "menu", "footer", "header", "masthead",
                          "sidebar", "breadcrumb", "breadcrumbs", "cookie", "banner", "social",
                          "share", "sharing", "skip", "pagination", "pager", "popup", "modal",
                          "newsletter", "sponsor", "advert", "promo"});
}

bool boilerplate_role(const Node& n) {
  static const std::unordered_set<std::string_view> roles = {
      "navigation", "banner", "contentinfo", "menu", "menubar", "complementary", "search"};
  return roles.count(to_lower(n.attr("role"))) > 0;
}

bool boilerplate_tag(std::string_view tag) {
  return tag == "nav" || tag == "header" || tag == "footer" || tag == "aside" || tag == "form" ||
         tag == "menu";
}

double class_weight(const Node& n) {
  auto toks = class_tokens(n);
  double w = 0;
  if (token_hit(toks, {"article", "body", "content", "entry", "main", "page", "post", "text",
                       "story", "policy", "privacy", "legal", "terms"}))
    w += 25;
  if (token_hit(toks, {"comment", "footer", "header", "menu", "nav", "sidebar", "sponsor",
                       "banner", "cookie", "social", "share", "related", "widget", "breadcrumb",
                       "promo", "masthead"}))
    w -= 25;
  return w;
}

bool has_block_child(const Node& n) {
  for (const auto& c : n.children)
    if (!c->is_text() && html::is_block(c->tag)) return true;
  return false;
}

bool paragraph_like(const Node& n) {
  static const std::unordered_set<std::string_view> k = {
      "p", "pre", "td", "li", "h1", "h2", "h3", "h4", "h5", "h6", "blockquote", "dd", "dt"};
  if (k.count(n.tag)) return true;
  return (n.tag == "div" || n.tag == "section") && !has_block_child(n);
}

double tag_base(std::string_view tag) {
  if (tag == "div" || tag == "article" || tag == "main" || tag == "section") return 5;
  if (tag == "pre" || tag == "td" || tag == "blockquote") return 3;
  if (tag == "address" || tag == "ol" || tag == "ul" || tag == "dl" || tag == "dd" ||
      tag == "dt" || tag == "li" || tag == "form")
    return -3;
  if (tag.size() == 2 && tag[0] == 'h' && tag[1] >= '1' && tag[1] <= '6') return -5;
  if (tag == "th") return -5;
  return 0;
}

bool unlikely(const Node& n) {
  if (n.tag == "body" || n.tag == "html" || n.tag == "article" || n.tag == "main") return false;
  if (boilerplate_tag(n.tag) || boilerplate_role(n)) return true;
  auto toks = class_tokens(n);
  bool bad = token_hit(toks, {"banner", "breadcrumb", "comment", "community", "disqus", "footer",
                              "header", "menu", "nav", "related", "remark", "rss", "sidebar",
                              "social", "sponsor", "pagination", "pager", "popup", "cookie"});
  bool maybe = token_hit(toks, {"article", "body", "column", "content", "main", "policy", "privacy"});
  return bad && !maybe;
}

std::size_t comma_count(std::string_view s) { return std::count(s.begin(), s.end(), ','); }

}  // namespace

const std::vector<std::string>& policy_link_terms() {
  static const std::vector<std::string> k = {"privacy polic", "privacy",     "terms of service",
                                             "web policies",  "cookie polic", "data polic",
                                             "legal"};
  return k;
}

bool is_pdf_href(std::string_view href) {
  std::string h = to_lower(href);
  auto cut = h.find_first_of("?#");
  if (cut != std::string::npos) h.resize(cut);
  return h.size() >= 4 && h.compare(h.size() - 4, 4, ".pdf") == 0;
}

std::vector<PolicyLink> find_policy_links(std::string_view markup) {
  auto doc = html::parse(markup);
  auto links = html::anchors(*doc.root);
  std::vector<bool> taken(links.size(), false);
  std::vector<PolicyLink> out;
  for (const auto& term : policy_link_terms()) {
    for (std::size_t i = links.size(); i-- > 0;) {
      if (taken[i]) continue;
      const auto& a = links[i];
      if (contains(to_lower(a.text), term) || contains(to_lower(a.title), term) ||
          contains(url_words(a.href), term)) {
        taken[i] = true;
        out.push_back(make_link(a, term));
      }
    }
  }
  return out;
}

std::vector<PolicyLink> find_full_policy_links(std::string_view policy_html) {
  auto doc = html::parse(policy_html);
  std::vector<PolicyLink> out;
  for (const auto& a : html::anchors(*doc.root)) {
    std::string t = to_lower(a.text + " " + a.title);
    bool subject = contains(t, "privacy") || contains(t, "policy");
    std::string_view extent;
    for (std::string_view w : {"full", "entire", "complete"})
      if (contains(t, w)) {
        extent = w;
        break;
      }
    if (subject && !extent.empty()) {
      out.push_back(make_link(a, std::string(contains(t, "privacy") ? "privacy" : "policy") + "+" +
                                     std::string(extent)));
      continue;
    }
    for (std::string_view term : {"privacy statement", "privacy polic", "privacy notice", "privacy"})
      if (contains(t, term)) {
        out.push_back(make_link(a, std::string(term)));
        break;
      }
  }
  return out;
}

std::string extract_density(std::string_view markup) {
  auto doc = html::parse(markup);
  const Node* body = doc.body();

  std::unordered_map<const Node*, double> score;
  std::vector<const Node*> order;  // candidates in first-touch order, for stable ties
  auto touch = [&](const Node* n) -> double& {
    auto it = score.find(n);
    if (it == score.end()) {
      order.push_back(n);
      it = score.emplace(n, tag_base(n->tag) + class_weight(*n)).first;
    }
    return it->second;
  };

  // Depth-first over non-pruned elements.
  std::vector<const Node*> stack = {body};
  while (!stack.empty()) {
    const Node* n = stack.back();
    stack.pop_back();
    if (n->is_text() || html::is_hidden(n->tag) || (n != body && unlikely(*n))) continue;
    if (paragraph_like(*n) && n != body) {
      std::string text = collapse_whitespace(html::inner_text(*n));
      if (text.size() >= 25) {
        double s = 1.0 + static_cast<double>(comma_count(text)) +
                   std::min(std::floor(static_cast<double>(text.size()) / 100.0), 3.0);
        const Node* anc = n->parent;
        for (int level = 0; anc && level < 5; ++level, anc = anc->parent) {
          if (anc->tag == "#document" || anc->tag == "html") break;
          double divider = level == 0 ? 1.0 : level == 1 ? 2.0 : level * 3.0;
          touch(anc) += s / divider;
        }
      }
    }
    for (auto it = n->children.rbegin(); it != n->children.rend(); ++it) stack.push_back(it->get());
  }

  const Node* top = nullptr;
  double best = -1e300;
  for (const Node* n : order) {
    double s = score[n] * (1.0 - html::link_density(*n));
    score[n] = s;
    if (s > best) {
      best = s;
      top = n;
    }
  }
  if (!top) top = body;

  auto skip = [](const Node& n) { return unlikely(n); };
  std::vector<const Node*> chosen;
  if (top->parent && top != body) {
    double threshold = std::max(10.0, best * 0.2);
    for (const auto& sib : top->parent->children) {
      const Node* s = sib.get();
      if (s->is_text()) continue;
      bool take = s == top;
      if (!take) {
        auto it = score.find(s);
        if (it != score.end() && it->second >= threshold) take = true;
      }
      if (!take && s->tag == "p" && !unlikely(*s)) {
        std::string text = collapse_whitespace(html::inner_text(*s));
        double ld = html::link_density(*s);
        if ((text.size() > 80 && ld < 0.25) ||
            (!text.empty() && ld == 0.0 && text.find(". ") != std::string::npos))
          take = true;
      }
      if (take) chosen.push_back(s);
    }
  } else {
    chosen.push_back(top);
  }
  std::string out;
  for (const Node* n : chosen) {
    std::string t = html::inner_text(*n, skip);
    if (t.empty()) continue;
    if (!out.empty()) out += '\n';
    out += t;
  }
  return out;
}

std::string extract_pruned(std::string_view markup) {
  auto doc = html::parse(markup);
  auto skip = [](const Node& n) {
    if (n.tag == "body" || n.tag == "html" || n.tag == "main" || n.tag == "article") return false;
    if (boilerplate_tag(n.tag) || boilerplate_role(n) || boilerplate_class(n)) return true;
    // Link farms: menus built from lists or divs.
    if (n.tag == "ul" || n.tag == "ol" || n.tag == "div" || n.tag == "table" || n.tag == "dl") {
      double ld = html::link_density(n);
      if (ld > 0.5) return true;
    }
    return false;
  };
  return html::inner_text(*doc.body(), skip);
}

std::string extract_main_text(std::string_view markup) {
  std::string a = extract_density(markup);
  std::string b = extract_pruned(markup);
  return b.size() > a.size() ? b : a;
}

namespace {

struct LanguageProfile {
  std::string_view code;
  std::unordered_set<std::string_view> words;
};

const std::vector<LanguageProfile>& profiles() {
  static const std::vector<LanguageProfile> k = {
      {"en", {"the", "of", "and", "to", "a", "in", "is", "you", "that", "it", "for", "we",
              "with", "as", "be", "on", "not", "this", "are", "or", "by", "your", "our",
              "from", "may", "will", "have", "an", "any", "which", "if", "at", "such"}},
      {"de", {"der", "die", "und", "in", "den", "von", "zu", "das", "mit", "sich", "des",
              "auf", "für", "ist", "im", "dem", "nicht", "ein", "eine", "als", "auch", "es",
              "an", "werden", "aus", "er", "hat", "dass", "sie", "nach", "wird", "bei", "wir",
              "ihre", "oder", "zur"}},
      {"fr", {"de", "la", "le", "et", "les", "des", "en", "un", "du", "une", "que", "est",
              "pour", "qui", "dans", "par", "au", "sur", "pas", "vous", "nous", "ce", "ou",
              "aux", "vos", "sont", "avec", "données", "plus", "ne", "se"}},
      {"es", {"de", "la", "que", "el", "en", "y", "a", "los", "del", "se", "las", "por", "un",
              "para", "con", "no", "una", "su", "al", "es", "lo", "como", "más", "o", "sus",
              "datos", "le", "nos", "usted"}},
      {"it", {"di", "e", "il", "la", "che", "in", "a", "per", "un", "del", "non", "della",
              "sono", "si", "le", "con", "da", "una", "dei", "al", "gli", "come", "nel",
              "alla", "o", "dati", "ai", "questo"}},
      {"nl", {"de", "en", "van", "het", "een", "in", "is", "dat", "op", "te", "voor", "met",
              "zijn", "niet", "aan", "er", "ook", "als", "bij", "door", "wij", "uw", "of",
              "worden", "deze", "wordt", "onze", "naar", "gegevens"}},
      {"pt", {"de", "a", "o", "que", "e", "do", "da", "em", "um", "para", "com", "não",
              "uma", "os", "no", "se", "na", "por", "mais", "as", "dos", "como", "ao", "das",
              "ou", "seus", "dados", "você", "nos"}},
  };
  return k;
}

}  // namespace

LanguageGuess detect_language(std::string_view text) {
  auto tokens = word_tokens(text);
  std::size_t n = 0;
  std::vector<std::size_t> hits(profiles().size(), 0);
  for (const auto& t : tokens) {
    std::string w = to_lower(t);
    ++n;
    for (std::size_t i = 0; i < profiles().size(); ++i) hits[i] += profiles()[i].words.count(w);
  }
  LanguageGuess g{"und", 0.0, false};
  if (n == 0) return g;
  std::size_t best = 0, second = 0;
  for (std::size_t i = 1; i < hits.size(); ++i)
    if (hits[i] > hits[best]) best = i;
  for (std::size_t i = 0; i < hits.size(); ++i)
    if (i != best && hits[i] > second) second = hits[i];
  if (hits[best] == 0) return g;
  g.language = std::string(profiles()[best].code);
  g.score = static_cast<double>(hits[best]) / static_cast<double>(n);
  g.confident = g.score >= 0.1 && static_cast<double>(hits[best]) >= 1.5 * static_cast<double>(second);
  return g;
}

GateVerdict gate(std::string_view text, const std::vector<PolicyClassifier>& classifiers,
                 std::size_t min_words) {
  GateVerdict v;
  auto lang = detect_language(text);
  v.language = lang.language;
  v.language_confident = lang.confident;
  v.word_count = word_tokens(text).size();
  bool any_above = classifiers.empty();
  for (const auto& c : classifiers) {
    double p = c.probability ? c.probability(text) : 0.0;
    v.policy_probabilities.push_back(p);
    if (!(p < c.threshold)) any_above = true;
  }
  v.passed = v.language == "en" && v.word_count >= min_words && any_above;
  return v;
}

}  // namespace privlens
