#pragma once

#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "config.hpp"
#include "privlens/corpus.hpp"
#include "privlens/stats.hpp"
#include "privlens/text_metrics.hpp"

namespace privlens::cli {

enum ExitCode : int { kSuccess = 0, kPartial = 1, kConfigError = 2 };

// Per-site chronology of passing policy texts. A month holds the latest
// passing snapshot taken in it; consecutive identical texts are merged.
struct Timelines {
  SiteTimelines texts;
  std::map<std::string, std::vector<std::string>> hashes;  // parallel to texts
  std::map<std::string, YearMonth> last_seen;
  YearMonth first{}, last{};
  bool empty() const { return texts.empty(); }
  const std::string& hash_of(const std::string& site, const SiteVersion* v) const;
};

Timelines build_timelines(const CorpusStore& store);

struct PolicyMetrics {
  std::string content_hash;
  std::string site;
  std::string first_seen;
  TextCounts counts;
  ReadabilityScores scores;
  ObfuscationStats obfuscation;
  PassiveStats passive;
  double time_to_read = 0;
};

// Names of the per-policy numeric columns, in CSV order.
const std::vector<std::string>& metric_names();
// NaN when the value is undefined for this policy (e.g. SMOG, DC).
double metric_value(const PolicyMetrics& m, const std::string& name);

class MetricsEngine {
 public:
  explicit MetricsEngine(const RunConfig& config);
  PolicyMetrics compute(const UniquePolicyText& u) const;

 private:
  CountingConfig counting_;
  bool dale_chall_ = false;
  std::vector<std::string> obfuscating_;
  WordSet stop_words_;
  WordSet irregular_;
};

int cmd_crawl(const RunConfig& config, std::ostream& log);
int cmd_extract(const RunConfig& config, const fs::path& html_dir, std::ostream& log);
int cmd_metrics(const RunConfig& config, std::ostream& log);
int cmd_terms(const RunConfig& config, std::ostream& log);
int cmd_segment(const RunConfig& config, std::ostream& log);
// gate=true trains the policy/non-policy gate classifiers instead of the
// content classifier bundle.
int cmd_train(const RunConfig& config, bool gate, std::ostream& log);
int cmd_label(const RunConfig& config, std::ostream& log);
int cmd_compare(const RunConfig& config, const std::string& term, const std::string& metric,
                YearMonth before, YearMonth after, std::ostream& log);
int cmd_report(const RunConfig& config, std::ostream& log);

// Where the shipped word lists and defaults live: $PRIVLENS_DATA, else the
// source tree's data/ directory.
fs::path data_dir();

}  // namespace privlens::cli
