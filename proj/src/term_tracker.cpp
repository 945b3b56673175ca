#include "privlens/term_tracker.hpp"

#include <fstream>

#include <json.hpp>

#include "privlens/error.hpp"
#include "privlens/tokenize.hpp"

namespace privlens {

namespace {

bool alnum(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9');
}

bool is_acronym(std::string_view p) {
  return p.size() <= 5 && p.find(' ') == std::string_view::npos;
}

bool bounded_find(std::string_view hay, std::string_view needle) {
  for (std::size_t pos = hay.find(needle); pos != std::string_view::npos;
       pos = hay.find(needle, pos + 1)) {
    bool left = pos == 0 || !alnum(hay[pos - 1]);
    std::size_t end = pos + needle.size();
    bool right = end >= hay.size() || !alnum(hay[end]);
    if (left && right) return true;
  }
  return false;
}

bool mentions_lower(std::string_view lower, const TermSpec& term) {
  for (const auto& p : term.patterns) {
    if (p.empty()) continue;
    if (is_acronym(p) ? bounded_find(lower, p) : lower.find(p) != std::string_view::npos)
      return true;
  }
  return false;
}

}  // namespace

bool mentions(std::string_view text, const TermSpec& term) {
  // Long forms may wrap across lines in extracted text.
  return mentions_lower(collapse_whitespace(to_lower(text)), term);
}

std::vector<TermSpec> default_terms() {
  return {
      {"GDPR", {"gdpr", "general data protection regulation"}},
      {"CCPA", {"ccpa", "california consumer privacy act"}},
      {"DNT", {"dnt", "do not track", "do-not-track"}},
      {"P3P", {"p3p", "platform for privacy preferences"}},
      {"Safe Harbor", {"safe harbor", "safe harbour"}},
      {"Privacy Shield", {"privacy shield"}},
      {"DPO", {"dpo", "data protection officer"}},
      {"complaint", {"complaint"}},
      {"erasure", {"erasure"}},
      {"rectification", {"rectification"}},
      {"data portability", {"data portability", "portability"}},
      {"legitimate interest", {"legitimate interest"}},
      {"adequacy decision", {"adequacy decision"}},
      {"standard contractual clauses",
       {"standard contractual clauses", "standard contract clauses", "standard contractual clause"}},
  };
}

std::vector<TermSpec> load_terms(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read term config: " + path.string());
  nlohmann::ordered_json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("malformed term config " + path.string() + ": " + e.what());
  }
  if (!j.is_object()) throw ConfigError("term config must be a JSON object");
  std::vector<TermSpec> terms;
  for (auto& [name, pats] : j.items()) {
    TermSpec t{name, {}};
    if (!pats.is_array()) throw ConfigError("term '" + name + "' needs a pattern list");
    for (const auto& p : pats) t.patterns.push_back(to_lower(p.get<std::string>()));
    if (t.patterns.empty()) throw ConfigError("term '" + name + "' has no patterns");
    terms.push_back(std::move(t));
  }
  return terms;
}

void save_terms(const std::filesystem::path& path, const std::vector<TermSpec>& terms) {
  nlohmann::ordered_json j = nlohmann::ordered_json::object();
  for (const auto& t : terms) j[t.canonical_name] = t.patterns;
  std::ofstream out(path);
  out << j.dump(2) << '\n';
}

std::map<std::string, MonthlySeries> term_series(
    const SiteTimelines& timelines, const std::vector<TermSpec>& terms,
    const std::map<std::string, YearMonth>& last_seen) {
  std::map<std::string, MonthlySeries> out;
  if (timelines.empty()) return out;
  YearMonth first{9999, 12}, last{0, 1};
  for (const auto& [site, versions] : timelines) {
    for (const auto& v : versions) {
      first = std::min(first, v.month);
      last = std::max(last, v.month);
    }
    if (auto it = last_seen.find(site); it != last_seen.end()) last = std::max(last, it->second);
  }
  // Cache one mention flag per (version, term).
  std::map<const SiteVersion*, std::vector<bool>> flags;
  for (const auto& [site, versions] : timelines) {
    for (const auto& v : versions) {
      std::string lower = collapse_whitespace(to_lower(v.text));
      auto& f = flags[&v];
      for (const auto& t : terms) f.push_back(mentions_lower(lower, t));
    }
  }
  for (const auto& t : terms) out[t.canonical_name];
  for (int o = first.ordinal(); o <= last.ordinal(); ++o) {
    YearMonth m = YearMonth::from_ordinal(o);
    auto active = versions_in_force(timelines, m, last_seen);
    if (active.empty()) continue;
    for (std::size_t ti = 0; ti < terms.size(); ++ti) {
      std::vector<double> ind;
      ind.reserve(active.size());
      for (const auto& [site, v] : active) ind.push_back(flags[v][ti] ? 1.0 : 0.0);
      out[terms[ti].canonical_name][m] = summarize(ind);
    }
  }
  return out;
}

}  // namespace privlens
