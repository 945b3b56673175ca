#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "privlens/stats.hpp"

namespace privlens {

struct TermSpec {
  std::string canonical_name;
  // Lowercase literals. Single-token patterns of at most five characters are
  // treated as acronyms and matched on word boundaries; everything else is a
  // plain substring match.
  std::vector<std::string> patterns;
};

bool mentions(std::string_view text, const TermSpec& term);

// The tracked regulatory terms with their acronym and long-form spellings.
std::vector<TermSpec> default_terms();

// JSON object: canonical_name -> [pattern, ...]. Throws ConfigError.
std::vector<TermSpec> load_terms(const std::filesystem::path& path);
void save_terms(const std::filesystem::path& path, const std::vector<TermSpec>& terms);

// Per term, the monthly fraction of sites whose in-force policy mentions the
// term (mean of 0/1 indicators, so n is the number of active policies).
// Months run from the earliest version to the latest version or last_seen
// month; months with no active policy produce no data point.
std::map<std::string, MonthlySeries> term_series(
    const SiteTimelines& timelines, const std::vector<TermSpec>& terms,
    const std::map<std::string, YearMonth>& last_seen = {});

}  // namespace privlens
