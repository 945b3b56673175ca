#include "pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <json.hpp>
#include <mutex>
#include <set>
#include <thread>

#include "privlens/archive_client.hpp"
#include "privlens/content_classifier.hpp"
#include "privlens/csv.hpp"
#include "privlens/error.hpp"
#include "privlens/extraction.hpp"
#include "privlens/linear_model.hpp"
#include "privlens/segmenter.hpp"
#include "privlens/term_tracker.hpp"
#include "privlens/tokenize.hpp"

#ifndef PRIVLENS_DATA_DIR
#define PRIVLENS_DATA_DIR "data"
#endif

namespace privlens::cli {

using nlohmann::ordered_json;

fs::path data_dir() {
  if (const char* env = std::getenv("PRIVLENS_DATA"); env && *env) return env;
  return PRIVLENS_DATA_DIR;
}

namespace {

std::string num(double v) {
  if (std::isnan(v)) return "";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

// Runs fn(i) for i in [0, n) on up to `workers` threads.
template <typename Fn>
void parallel_for(std::size_t n, int workers, Fn fn) {
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  std::mutex err_mu;
  std::exception_ptr first_error;
  auto body = [&] {
    for (std::size_t i; (i = next++) < n;) {
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(err_mu);
        if (!first_error) first_error = std::current_exception();
      }
    }
  };
  int threads = std::max(1, std::min<int>(workers, static_cast<int>(n)));
  for (int t = 1; t < threads; ++t) pool.emplace_back(body);
  body();
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

std::vector<std::string> read_sites(const fs::path& path) {
  if (path.empty()) throw ConfigError("no site list configured (--sites)");
  std::vector<std::string> out;
  std::string text;
  try {
    text = read_file(path);
  } catch (const Error&) {
    throw ConfigError("cannot read site list " + path.string());
  }
  for (const auto& raw : csv::parse(text)) {
    if (raw.empty()) continue;
    std::string s = collapse_whitespace(raw[0]);
    if (s.empty() || s[0] == '#') continue;
    out.push_back(s);
  }
  return out;
}

fs::path or_default(const fs::path& configured, const char* shipped) {
  return configured.empty() ? data_dir() / shipped : configured;
}

std::vector<TermSpec> terms_for(const RunConfig& c) {
  return c.terms.empty() ? default_terms() : load_terms(c.terms);
}

LabelSchema schema_for(const RunConfig& c) {
  return c.schema.empty() ? LabelSchema::opp115() : LabelSchema::load(c.schema);
}

CorpusStore open_corpus_or_throw(const RunConfig& c) {
  if (!fs::exists(c.corpus_dir / "snapshots.jsonl"))
    throw ConfigError("no corpus at " + c.corpus_dir.string() + " (run `privlens crawl` first)");
  return CorpusStore(c.corpus_dir);
}

std::string host_free(const std::string& url) {
  std::string u = to_lower(url);
  if (auto p = u.find("://"); p != std::string::npos) u = u.substr(p + 3);
  while (!u.empty() && u.back() == '/') u.pop_back();
  return u;
}

}  // namespace

// ---------------------------------------------------------------- timelines

const std::string& Timelines::hash_of(const std::string& site, const SiteVersion* v) const {
  const auto& tl = texts.at(site);
  return hashes.at(site).at(static_cast<std::size_t>(v - tl.data()));
}

Timelines build_timelines(const CorpusStore& store) {
  // site -> month -> (timestamp, hash) of the latest passing snapshot
  std::map<std::string, std::map<YearMonth, std::pair<Timestamp, std::string>>> by_month;
  for (const auto& s : store.snapshots()) {
    if (!s.text_ref) continue;
    auto& slot = by_month[s.site][s.archive_timestamp.year_month()];
    if (slot.second.empty() || s.archive_timestamp >= slot.first) slot = {s.archive_timestamp, *s.text_ref};
  }
  Timelines t;
  bool any = false;
  for (const auto& [site, months] : by_month) {
    auto& texts = t.texts[site];
    auto& hashes = t.hashes[site];
    for (const auto& [month, entry] : months) {
      if (!hashes.empty() && hashes.back() == entry.second) continue;
      auto text = store.text(entry.second);
      if (!text) throw StorageError("missing text for " + entry.second);
      texts.push_back({month, *text});
      hashes.push_back(entry.second);
    }
    YearMonth first = months.begin()->first, last = months.rbegin()->first;
    t.last_seen[site] = last;
    if (!any || first < t.first) t.first = first;
    if (!any || last > t.last) t.last = last;
    any = true;
  }
  return t;
}

// ------------------------------------------------------------------ metrics

const std::vector<std::string>& metric_names() {
  static const std::vector<std::string> k = {
      "words", "sentences", "syllables", "characters", "polysyllables", "difficult_words",
      "complex_words", "fre", "fkg", "ari", "cl", "smog", "dc", "gf", "obfuscating_word_count",
      "sentences_with_obfuscating_fraction", "passive_sentence_fraction", "time_to_read"};
  return k;
}

double metric_value(const PolicyMetrics& m, const std::string& name) {
  const double nan = std::nan("");
  const auto& c = m.counts;
  const auto& s = m.scores;
  if (name == "words") return static_cast<double>(c.words);
  if (name == "sentences") return static_cast<double>(c.sentences);
  if (name == "syllables") return static_cast<double>(c.syllables);
  if (name == "characters") return static_cast<double>(c.characters);
  if (name == "polysyllables") return static_cast<double>(c.polysyllables);
  if (name == "difficult_words") return static_cast<double>(c.difficult_words);
  if (name == "complex_words") return static_cast<double>(c.complex_words);
  if (name == "fre") return s.fre;
  if (name == "fkg") return s.fkg;
  if (name == "ari") return s.ari;
  if (name == "cl") return s.cl;
  if (name == "smog") return s.smog ? *s.smog : nan;
  if (name == "dc") return s.dc ? *s.dc : nan;
  if (name == "gf") return s.gf;
  if (name == "obfuscating_word_count") return static_cast<double>(m.obfuscation.obfuscating_word_count);
  if (name == "sentences_with_obfuscating_fraction") return m.obfuscation.sentences_with_obfuscating_fraction;
  if (name == "passive_sentence_fraction") return m.passive.passive_sentence_fraction;
  if (name == "time_to_read") return m.time_to_read;
  throw ConfigError("unknown metric \"" + name + "\"");
}

MetricsEngine::MetricsEngine(const RunConfig& c) : counting_(c.counting) {
  if (counting_.syllable_strategy == SyllableStrategy::hyphenation_dict)
    counting_.hyphenation = std::make_shared<HyphenationDict>(
        HyphenationDict::load(or_default(c.hyphenation, "hyphenation/en_us.txt")));
  counting_.familiar_words =
      std::make_shared<WordSet>(load_word_list(or_default(c.familiar_words, "wordlists/dale_chall_familiar.txt")));
  dale_chall_ = true;
  obfuscating_ = load_word_lines(or_default(c.obfuscating_words, "wordlists/obfuscating_words.txt"));
  stop_words_ = c.stop_words.empty() ? default_stop_words() : load_word_list(c.stop_words);
  irregular_ = c.irregular_participles.empty() ? default_irregular_participles()
                                               : load_word_list(c.irregular_participles);
}

PolicyMetrics MetricsEngine::compute(const UniquePolicyText& u) const {
  PolicyMetrics m;
  m.content_hash = u.content_hash;
  m.site = u.site;
  m.first_seen = u.first_seen.to_iso();
  m.counts = count(u.text, counting_);
  m.scores = readability(m.counts, {.force_smog = false, .dale_chall = dale_chall_});
  m.obfuscation = obfuscation(u.text, obfuscating_, stop_words_);
  m.passive = passive_fraction(u.text, irregular_);
  m.time_to_read = time_to_read(static_cast<double>(m.counts.words));
  return m;
}

namespace {

std::map<std::string, PolicyMetrics> compute_all(const RunConfig& c, const std::vector<UniquePolicyText>& uniques) {
  MetricsEngine engine(c);
  std::vector<PolicyMetrics> out(uniques.size());
  parallel_for(uniques.size(), c.workers, [&](std::size_t i) { out[i] = engine.compute(uniques[i]); });
  std::map<std::string, PolicyMetrics> by_hash;
  for (auto& m : out) by_hash.emplace(m.content_hash, std::move(m));
  return by_hash;
}

std::string series_header() { return "month,mean,ci_low,ci_high,q25,q75,n\n"; }

std::string series_rows(const MonthlySeries& series, const std::string& prefix = {}) {
  std::string out;
  for (const auto& [month, p] : series)
    out += prefix + month.to_string() + "," + num(p.mean) + "," + num(p.ci_low) + "," + num(p.ci_high) + "," +
           num(p.q25) + "," + num(p.q75) + "," + std::to_string(p.n) + "\n";
  return out;
}

// Values of `metric` for the policies in force in `month`.
std::vector<double> in_force_values(const Timelines& t, const std::map<std::string, PolicyMetrics>& metrics,
                                    YearMonth month, const std::string& metric,
                                    const std::set<std::string>* only_sites = nullptr) {
  std::vector<double> out;
  for (const auto& [site, v] : versions_in_force(t.texts, month, t.last_seen)) {
    if (only_sites && !only_sites->count(site)) continue;
    double x = metric_value(metrics.at(t.hash_of(site, v)), metric);
    if (!std::isnan(x)) out.push_back(x);
  }
  return out;
}

}  // namespace

// -------------------------------------------------------------------- crawl

namespace {

struct SiteResult {
  std::string site;
  std::vector<std::pair<PolicySnapshot, std::string>> snapshots;  // text for passing ones
  int landing_snapshots = 0;
  std::set<std::string> policy_urls;
  std::vector<std::string> pdf_links;
  int full_policy_chases = 0;
  std::vector<std::string> errors;
};

class Crawler {
 public:
  Crawler(const RunConfig& c, std::vector<PolicyClassifier> classifiers)
      : c_(c), client_(c.archive_base_url, c.fetch), classifiers_(std::move(classifiers)) {}

  SiteResult crawl(const std::string& site) const {
    SiteResult r;
    r.site = site;
    std::vector<CdxEntry> landing;
    try {
      landing = fetchable(client_.cdx_list(site));
    } catch (const Error& e) {
      r.errors.push_back("landing index: " + std::string(e.what()));
      return r;
    }
    landing = build_schedule(c_.landing_schedule, landing);
    std::vector<std::string> policy_urls;  // in order of discovery
    for (const auto& entry : landing) {
      ++r.landing_snapshots;
      FetchResult page;
      try {
        page = client_.fetch_snapshot(entry);
      } catch (const Error& e) {
        r.errors.push_back("landing " + entry.archive_timestamp.to_cdx() + ": " + e.what());
        continue;
      }
      for (const auto& link : find_policy_links(page.body)) {
        std::string url = resolve_href(entry.original_url, link.href);
        if (link.is_pdf) {
          if (std::find(r.pdf_links.begin(), r.pdf_links.end(), url) == r.pdf_links.end()) r.pdf_links.push_back(url);
          continue;
        }
        if (std::find(policy_urls.begin(), policy_urls.end(), url) == policy_urls.end()) {
          policy_urls.push_back(url);
          links_[url] = link;
        }
        break;  // highest-priority usable link only
      }
    }
    for (const auto& url : policy_urls) {
      r.policy_urls.insert(url);
      crawl_policy(site, url, r);
    }
    return r;
  }

 private:
  std::vector<CdxEntry> fetchable(std::vector<CdxEntry> entries) const {
    std::vector<CdxEntry> out;
    for (auto& e : entries)
      if (e.fetchable() && e.archive_timestamp.year_month() <= c_.crawl_end) out.push_back(std::move(e));
    return out;
  }

  void crawl_policy(const std::string& site, const std::string& url, SiteResult& r) const {
    std::vector<CdxEntry> entries;
    try {
      entries = build_schedule(SnapshotSchedule::monthly_only(), fetchable(client_.cdx_list(url)));
    } catch (const Error& e) {
      r.errors.push_back("policy index " + url + ": " + e.what());
      return;
    }
    PolicyLink link = links_.at(url);
    link.href = url;
    for (const auto& entry : entries) {
      FetchResult page;
      try {
        page = client_.fetch_snapshot(entry);
      } catch (const Error& e) {
        r.errors.push_back("policy " + url + " " + entry.archive_timestamp.to_cdx() + ": " + e.what());
        continue;
      }
      std::string text = extract_main_text(page.body);
      // A summary page that links to the complete policy: use the full text.
      for (const auto& full : find_full_policy_links(page.body)) {
        if (full.is_pdf) continue;
        std::string full_url = resolve_href(url, full.href);
        if (host_free(full_url) == host_free(url)) continue;
        try {
          auto full_page = client_.get("/web/" + entry.archive_timestamp.to_cdx() + "/" + full_url, c_.fetch);
          std::string full_text = extract_main_text(full_page.body);
          if (full_text.size() > text.size()) {
            text = std::move(full_text);
            page.partial = page.partial || full_page.partial;
          }
          ++r.full_policy_chases;
        } catch (const Error& e) {
          r.errors.push_back("full policy " + full_url + ": " + e.what());
        }
        break;
      }
      PolicySnapshot s;
      s.site = site;
      s.link = link;
      s.archive_timestamp = entry.archive_timestamp;
      s.partial = page.partial;
      s.gate = gate(text, classifiers_, c_.gate_min_words);
      if (!s.gate.passed) text.clear();
      r.snapshots.emplace_back(std::move(s), std::move(text));
    }
  }

  const RunConfig& c_;
  ArchiveClient client_;
  std::vector<PolicyClassifier> classifiers_;
  mutable std::map<std::string, PolicyLink> links_;
};

std::vector<PolicyClassifier> load_gate(const RunConfig& c) {
  std::vector<PolicyClassifier> out;
  for (const auto& m : c.gate_models) {
    std::shared_ptr<ClassifierBackend> model;
    try {
      model = load_backend(m.path);
    } catch (const Error& e) {
      throw ConfigError("gate model " + m.path.string() + ": " + e.what());
    }
    out.push_back({[model](std::string_view text) { return model->predict_proba(text).at(0); }, m.threshold});
  }
  return out;
}

}  // namespace

int cmd_crawl(const RunConfig& c, std::ostream& log) {
  auto sites = read_sites(c.site_list);
  if (sites.empty()) {
    log << "crawl: site list is empty, nothing to do\n";
    return kSuccess;
  }
  auto classifiers = load_gate(c);
  CorpusStore store(c.corpus_dir);

  std::vector<SiteResult> results(sites.size());
  std::mutex log_mu;
  std::atomic<std::size_t> done{0};
  parallel_for(sites.size(), c.workers, [&](std::size_t i) {
    Crawler crawler(c, classifiers);  // per-site link memory
    results[i] = crawler.crawl(sites[i]);
    std::lock_guard lock(log_mu);
    log << "[" << ++done << "/" << sites.size() << "] " << sites[i] << ": " << results[i].snapshots.size()
        << " policy snapshots, " << results[i].errors.size() << " errors\n";
  });

  // Store mutations happen in site order so reruns write identical files.
  ordered_json summary = ordered_json::array();
  bool any_error = false;
  for (auto& r : results) {
    int passed = 0;
    for (auto& [snap, text] : r.snapshots) {
      if (snap.gate.passed) {
        snap.text_ref = store.dedupe(text, snap.archive_timestamp, r.site).content_hash;
        ++passed;
      }
      store.add_snapshot(std::move(snap));
    }
    any_error = any_error || !r.errors.empty();
    summary.push_back({{"site", r.site},
                       {"landing_snapshots", r.landing_snapshots},
                       {"policy_urls", r.policy_urls},
                       {"pdf_links_skipped", r.pdf_links},
                       {"full_policy_chases", r.full_policy_chases},
                       {"policy_snapshots", r.snapshots.size()},
                       {"passed_gate", passed},
                       {"errors", r.errors}});
    for (const auto& e : r.errors) log << "  " << r.site << ": " << e << "\n";
  }
  store.save();
  write_file_atomic(c.corpus_dir / "crawl_summary.json", summary.dump(2) + "\n");
  log << "crawl: " << store.snapshots().size() << " snapshots, " << store.uniques().size()
      << " unique texts\n";
  return any_error ? kPartial : kSuccess;
}

// ------------------------------------------------------------------ extract

int cmd_extract(const RunConfig& c, const fs::path& html_dir, std::ostream& log) {
  if (!fs::is_directory(html_dir)) throw ConfigError("not a directory: " + html_dir.string());
  auto classifiers = load_gate(c);
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(html_dir))
    if (e.is_regular_file() && (e.path().extension() == ".html" || e.path().extension() == ".htm"))
      files.push_back(e.path());
  std::sort(files.begin(), files.end());
  std::vector<std::string> lines(files.size());
  fs::path out_dir = c.output() / "extracted";
  fs::create_directories(out_dir);
  parallel_for(files.size(), c.workers, [&](std::size_t i) {
    std::string text = extract_main_text(read_file(files[i]));
    auto v = gate(text, classifiers, c.gate_min_words);
    write_file_atomic(out_dir / (files[i].stem().string() + ".txt"), tidy_policy_text(text) + "\n");
    ordered_json j{{"file", files[i].filename().string()},
                   {"language", v.language},
                   {"language_confident", v.language_confident},
                   {"word_count", v.word_count},
                   {"policy_probabilities", v.policy_probabilities},
                   {"passed", v.passed},
                   {"content_hash", content_hash(text)}};
    lines[i] = j.dump() + "\n";
  });
  std::string all;
  for (const auto& l : lines) all += l;
  write_file_atomic(c.output() / "extracted.jsonl", all);
  log << "extract: " << files.size() << " pages -> " << (c.output() / "extracted.jsonl").string() << "\n";
  return kSuccess;
}

// ------------------------------------------------------------------ metrics

int cmd_metrics(const RunConfig& c, std::ostream& log) {
  auto store = open_corpus_or_throw(c);
  auto uniques = store.uniques();
  if (uniques.empty()) {
    log << "metrics: corpus has no unique policy texts\n";
    return kPartial;
  }
  auto metrics = compute_all(c, uniques);

  std::vector<std::string> header = {"content_hash", "site", "first_seen"};
  for (const auto& n : metric_names()) header.push_back(n);
  header.push_back("smog_valid");
  std::string out = csv::row(header);
  for (const auto& [hash, m] : metrics) {
    std::vector<std::string> row = {m.content_hash, m.site, m.first_seen};
    for (const auto& n : metric_names()) row.push_back(num(metric_value(m, n)));
    row.push_back(m.scores.smog_valid ? "1" : "0");
    out += csv::row(row);
  }
  fs::create_directories(c.output() / "series");
  write_file_atomic(c.output() / "metrics.csv", out);

  auto t = build_timelines(store);
  for (const auto& name : metric_names()) {
    MonthlySeries series;
    for (YearMonth m = t.first; m <= t.last; m = m.next()) {
      auto values = in_force_values(t, metrics, m, name);
      if (!values.empty()) series[m] = summarize(values);
    }
    write_file_atomic(c.output() / "series" / (name + ".csv"), series_header() + series_rows(series));
  }

  std::string rates = "month,updated,sites,fraction\n";
  for (YearMonth m = t.first.next(); m <= t.last; m = m.next()) {
    auto r = update_rate(t.texts, m, t.last_seen);
    if (r.sites == 0) continue;
    rates += m.to_string() + "," + std::to_string(r.updated) + "," + std::to_string(r.sites) + "," +
             num(r.fraction) + "\n";
  }
  write_file_atomic(c.output() / "update_rate.csv", rates);

  // Annual reading time from the mean length of the policies in force each
  // December (or the last crawled month of the final year).
  std::string reading = "year,month,mean_words,policies,annual_hours\n";
  for (int y = t.first.year; y <= t.last.year; ++y) {
    YearMonth m = std::min(YearMonth{y, 12}, t.last);
    auto words = in_force_values(t, metrics, m, "words");
    if (words.empty()) continue;
    double mw = mean(words);
    reading += std::to_string(y) + "," + m.to_string() + "," + num(mw) + "," + std::to_string(words.size()) + "," +
               num(annual_reading_hours(mw)) + "\n";
  }
  write_file_atomic(c.output() / "reading_time.csv", reading);
  log << "metrics: " << metrics.size() << " policies, months " << t.first.to_string() << ".." << t.last.to_string()
      << " -> " << c.output().string() << "\n";
  return kSuccess;
}

// -------------------------------------------------------------------- terms

int cmd_terms(const RunConfig& c, std::ostream& log) {
  auto store = open_corpus_or_throw(c);
  auto t = build_timelines(store);
  if (t.empty()) {
    log << "terms: corpus has no policy texts\n";
    return kPartial;
  }
  auto terms = terms_for(c);
  auto series = term_series(t.texts, terms, t.last_seen);
  std::string out = "term,month,fraction,ci_low,ci_high,q25,q75,n\n";
  std::string first = "term,site,first_month\n";
  for (const auto& term : terms) {
    out += series_rows(series[term.canonical_name], csv::escape(term.canonical_name) + ",");
    for (const auto& [site, versions] : t.texts)
      for (const auto& v : versions)
        if (mentions(v.text, term)) {
          first += csv::row({term.canonical_name, site, v.month.to_string()});
          break;
        }
  }
  fs::create_directories(c.output());
  write_file_atomic(c.output() / "terms.csv", out);
  write_file_atomic(c.output() / "term_first_mentions.csv", first);
  log << "terms: " << terms.size() << " terms over " << t.texts.size() << " sites\n";
  return kSuccess;
}

// ------------------------------------------------------------------ segment

namespace {

EmbeddingTable embeddings_for(const RunConfig& c, const std::vector<UniquePolicyText>& uniques,
                              std::ostream& log) {
  if (!c.embeddings.empty()) {
    if (!fs::exists(c.embeddings)) throw ConfigError("embeddings file not found: " + c.embeddings.string());
    return EmbeddingTable::load(c.embeddings);
  }
  std::vector<std::string> corpus;
  for (const auto& u : uniques)
    for (auto& s : segment_sentences(u.text)) corpus.push_back(std::move(s));
  EmbeddingOptions o;
  o.dimension = c.embedding_dimension;
  o.min_count = c.embedding_min_count;
  o.epochs = c.embedding_epochs;
  o.seed = c.seed;
  log << "segment: training " << o.dimension << "-d embeddings on " << corpus.size() << " sentences\n";
  auto table = train_embeddings(corpus, o);
  table.save(c.output() / "embeddings.txt");
  return table;
}

struct StoredSegment {
  std::string policy_ref;
  int index = 0;
  std::string text;
};

std::vector<StoredSegment> read_segments(const fs::path& file) {
  if (!fs::exists(file)) throw ConfigError("no segments at " + file.string() + " (run `privlens segment` first)");
  std::vector<StoredSegment> out;
  std::string all = read_file(file);
  std::size_t start = 0;
  while (start < all.size()) {
    auto end = all.find('\n', start);
    if (end == std::string::npos) end = all.size();
    if (end > start) {
      auto j = nlohmann::json::parse(all.substr(start, end - start));
      out.push_back({j.at("policy_ref"), j.at("index"), j.at("text")});
    }
    start = end + 1;
  }
  return out;
}

}  // namespace

int cmd_segment(const RunConfig& c, std::ostream& log) {
  auto store = open_corpus_or_throw(c);
  auto uniques = store.uniques();
  if (uniques.empty()) {
    log << "segment: corpus has no unique policy texts\n";
    return kPartial;
  }
  fs::create_directories(c.output());
  auto emb = embeddings_for(c, uniques, log);
  std::vector<std::vector<Segment>> per(uniques.size());
  parallel_for(uniques.size(), c.workers, [&](std::size_t i) {
    per[i] = segment(uniques[i].text, emb, c.segment_threshold, c.segment_min_size, uniques[i].content_hash);
  });
  std::string out;
  std::size_t total = 0;
  for (const auto& segs : per)
    for (const auto& s : segs) {
      ordered_json j{{"policy_ref", s.policy_ref},
                     {"index", s.index},
                     {"sentence_begin", s.sentence_begin},
                     {"sentence_end", s.sentence_end},
                     {"text", s.text}};
      out += j.dump() + "\n";
      ++total;
    }
  write_file_atomic(c.output() / "segments.jsonl", out);
  log << "segment: " << total << " segments from " << uniques.size() << " policies\n";
  return kSuccess;
}

// -------------------------------------------------------------------- train

namespace {

std::vector<std::string> texts_in(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw ConfigError("missing gate training directory " + dir.string());
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.is_regular_file() && e.path().extension() == ".txt") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  std::vector<std::string> out;
  for (const auto& f : files) out.push_back(read_file(f));
  if (out.empty()) throw ConfigError("no .txt files in " + dir.string());
  return out;
}

ordered_json evaluation_json(const Evaluation& e) {
  ordered_json per = ordered_json::array();
  for (const auto& s : e.per_label)
    per.push_back({{"label", s.label},
                   {"tp", s.tp},
                   {"fp", s.fp},
                   {"fn", s.fn},
                   {"support", s.support},
                   {"precision", s.precision},
                   {"recall", s.recall},
                   {"f1", s.f1},
                   {"precision_defined", s.precision_defined}});
  return {{"micro", {{"precision", e.micro_precision}, {"recall", e.micro_recall}, {"f1", e.micro_f1}}},
          {"macro", {{"precision", e.macro_precision}, {"recall", e.macro_recall}, {"f1", e.macro_f1}}},
          {"per_label", per}};
}

// Thresholded predictions over `space`, evaluated as the hierarchy labels.
Evaluation evaluate_bundle(const ModelBundle& b, const std::vector<LabeledSegment>& segs,
                           const std::vector<Label>& space, double threshold) {
  LabelMatrix pred;
  for (const auto& s : segs) {
    auto labels = label_segment(s.text, b, threshold).labels(threshold);
    std::vector<std::uint8_t> row;
    for (const auto& l : space) row.push_back(labels.count(l) > 0);
    pred.push_back(std::move(row));
  }
  std::vector<std::string> names;
  for (const auto& l : space) names.push_back(l.display());
  return evaluate(label_matrix(segs, space), pred, names);
}

int train_gate(const RunConfig& c, std::ostream& log) {
  if (c.gate_training_dir.empty()) throw ConfigError("gate.training_dir is not set");
  if (c.gate_models.empty()) throw ConfigError("gate.models lists no output paths");
  auto policies = texts_in(c.gate_training_dir / "policies");
  std::vector<fs::path> negatives;
  for (const auto& e : fs::directory_iterator(c.gate_training_dir))
    if (e.is_directory() && e.path().filename() != "policies") negatives.push_back(e.path());
  std::sort(negatives.begin(), negatives.end());
  if (negatives.size() < c.gate_models.size())
    throw ConfigError("gate needs one negative set per model; found " + std::to_string(negatives.size()));
  for (std::size_t k = 0; k < c.gate_models.size(); ++k) {
    auto neg = texts_in(negatives[k]);
    std::vector<std::string> texts = policies;
    LabelMatrix y(policies.size(), std::vector<std::uint8_t>{1});
    for (auto& t : neg) {
      texts.push_back(std::move(t));
      y.push_back({0});
    }
    LinearBackend model(LogisticOptions{.balanced = true});
    model.fit(texts, y);
    fs::create_directories(c.gate_models[k].path.parent_path().empty() ? fs::path(".")
                                                                        : c.gate_models[k].path.parent_path());
    model.save(c.gate_models[k].path);
    log << "train: gate model " << k + 1 << " (policies vs " << negatives[k].filename().string() << ") -> "
        << c.gate_models[k].path.string() << "\n";
  }
  return kSuccess;
}

}  // namespace

int cmd_train(const RunConfig& c, bool gate_models, std::ostream& log) {
  if (gate_models) return train_gate(c, log);
  if (c.annotations_dir.empty()) throw ConfigError("classifier.annotations is not set");
  auto schema = schema_for(c);
  // Either the OPP-115 release layout or flat annotation CSVs.
  bool opp = fs::is_directory(c.annotations_dir / "sanitized_policies");
  auto segments = consolidate_all(opp ? load_opp115(c.annotations_dir) : load_annotations(c.annotations_dir), schema,
                                  c.min_agree);
  if (segments.empty()) throw ConfigError("no annotated segments under " + c.annotations_dir.string());
  auto split = stratified_split(segments, schema.labels(), c.seed, c.split_ratios);
  std::vector<LabeledSegment> parts[3];
  for (std::size_t i = 0; i < segments.size(); ++i)
    parts[static_cast<int>(split.subset[i])].push_back(segments[i]);
  log << "train: " << parts[0].size() << " train / " << parts[1].size() << " validation / " << parts[2].size()
      << " test segments\n";

  auto bundle = train_hierarchy(parts[0], schema, LinearBackend::factory());
  const auto& held_out = parts[2].empty() ? parts[1] : parts[2];

  ordered_json report;
  report["segments"] = {{"train", parts[0].size()}, {"validation", parts[1].size()}, {"test", parts[2].size()}};
  report["untrainable_attributes"] = bundle.untrainable;
  auto top = evaluate_bundle(bundle, held_out, schema.category_labels(), c.label_threshold);
  report["top_level"] = evaluation_json(top);
  std::vector<Label> attr_space;
  for (const auto& l : schema.labels())
    if (l.level == LabelLevel::attribute) attr_space.push_back(l);
  auto attrs = evaluate_bundle(bundle, held_out, attr_space, c.label_threshold);
  report["attributes"] = evaluation_json(attrs);

  // Labels with low held-out precision are excluded from later analyses.
  LabelSet excluded = schema.excluded();
  std::set<std::string> low;
  for (const auto* e : {&top, &attrs}) {
    auto f = precision_filter(*e, c.min_precision);
    for (const auto& name : f.excluded) low.insert(name);
  }
  for (const auto& l : schema.labels())
    if (low.count(l.display())) excluded.insert(l);
  bundle.schema.set_excluded(excluded);
  ordered_json ex = ordered_json::array();
  for (const auto& l : excluded) ex.push_back(l.display());
  report["excluded_labels"] = ex;

  fs::create_directories(c.output());
  bundle.save(c.bundle());
  write_file_atomic(c.output() / "evaluation.json", report.dump(2) + "\n");
  log << "train: top-level micro-F1 " << num(top.micro_f1) << ", attribute micro-F1 " << num(attrs.micro_f1)
      << "; bundle -> " << c.bundle().string() << "\n";
  return kSuccess;
}

// -------------------------------------------------------------------- label

int cmd_label(const RunConfig& c, std::ostream& log) {
  if (!fs::exists(c.bundle() / "manifest.json"))
    throw ConfigError("no trained bundle at " + c.bundle().string() + " (run `privlens train` first)");
  auto bundle = ModelBundle::load(c.bundle());
  auto store = open_corpus_or_throw(c);
  auto segs = read_segments(c.output() / "segments.jsonl");
  const double thr = c.label_threshold;

  std::vector<SegmentLabels> labeled(segs.size());
  parallel_for(segs.size(), c.workers, [&](std::size_t i) { labeled[i] = label_segment(segs[i].text, bundle, thr); });

  const auto& excluded = bundle.schema.excluded();
  std::vector<Label> space;
  for (const auto& l : bundle.schema.labels())
    if (!excluded.count(l)) space.push_back(l);
  auto prob_of = [](const SegmentLabels& s, const Label& l) {
    if (l.level == LabelLevel::category) {
      auto it = s.category_probs.find(l.name);
      return it == s.category_probs.end() ? 0.0 : it->second;
    }
    auto it = s.attribute_probs.find({l.name, l.value});
    return it == s.attribute_probs.end() ? 0.0 : it->second;
  };

  // Per policy: segments with distinct label sets, then the highest
  // probability of each label over them.
  std::map<std::string, std::vector<SegmentLabels>> by_policy;
  std::string out;
  for (std::size_t i = 0; i < segs.size(); ++i) {
    by_policy[segs[i].policy_ref].push_back(labeled[i]);
    ordered_json labels = ordered_json::array();
    for (const auto& l : labeled[i].labels(thr))
      if (!excluded.count(l)) labels.push_back(l.display());
    ordered_json cats = ordered_json::object();
    for (const auto& [k, p] : labeled[i].category_probs) cats[k] = p;
    ordered_json attrs = ordered_json::object();
    for (const auto& [k, p] : labeled[i].attribute_probs) attrs[k.first + "=" + k.second] = p;
    out += ordered_json{{"policy_ref", segs[i].policy_ref},
                        {"index", segs[i].index},
                        {"labels", labels},
                        {"category_probs", cats},
                        {"attribute_probs", attrs}}
               .dump() +
           "\n";
  }
  std::map<std::string, std::vector<double>> policy_probs;
  for (const auto& [ref, list] : by_policy) {
    std::vector<double> p(space.size(), 0.0);
    for (const auto& s : dedup_labels(list, thr))
      for (std::size_t k = 0; k < space.size(); ++k) p[k] = std::max(p[k], prob_of(s, space[k]));
    policy_probs[ref] = std::move(p);
  }

  auto t = build_timelines(store);
  std::string first = "site,label,first_seen\n";
  for (const auto& [site, versions] : t.texts) {
    std::vector<DatedLabels> dated;
    for (std::size_t v = 0; v < versions.size(); ++v) {
      auto it = policy_probs.find(t.hashes.at(site)[v]);
      if (it == policy_probs.end()) continue;
      DatedLabels d{{versions[v].month.year, versions[v].month.month, 1, 0, 0, 0}, {}};
      for (std::size_t k = 0; k < space.size(); ++k)
        if (it->second[k] > thr) d.labels.insert(space[k]);
      dated.push_back(std::move(d));
    }
    for (const auto& [label, when] : first_mention(dated))
      first += csv::row({site, label.display(), YearMonth{when.year, when.month}.to_string()});
  }

  // Per year: the policies in force in December. The expected count is the
  // Poisson-Binomial mean of the policy probabilities; k_low/k_high bound
  // the 95% prediction interval.
  std::string fractions =
      "year,label,policies,labeled,expected,k_low,k_high,fraction,fraction_low,fraction_high\n";
  if (!t.empty()) {
    for (int y = t.first.year; y <= t.last.year; ++y) {
      YearMonth m = std::min(YearMonth{y, 12}, t.last);
      std::vector<const std::vector<double>*> active;
      for (const auto& [site, v] : versions_in_force(t.texts, m, t.last_seen)) {
        auto it = policy_probs.find(t.hash_of(site, v));
        if (it != policy_probs.end()) active.push_back(&it->second);
      }
      if (active.empty()) continue;
      const double n = static_cast<double>(active.size());
      for (std::size_t k = 0; k < space.size(); ++k) {
        std::vector<double> p;
        long labeled_count = 0;
        for (const auto* probs : active) {
          p.push_back((*probs)[k]);
          labeled_count += (*probs)[k] > thr;
        }
        PoissonBinomial dist(p);
        auto iv = prediction_interval(dist);
        fractions += csv::row({std::to_string(y), space[k].display(), std::to_string(active.size()),
                               std::to_string(labeled_count), num(dist.mean()), std::to_string(iv.low),
                               std::to_string(iv.high), num(labeled_count / n), num(iv.low / n),
                               num(iv.high / n)});
      }
    }
  }
  write_file_atomic(c.output() / "labels.jsonl", out);
  write_file_atomic(c.output() / "label_first_mentions.csv", first);
  write_file_atomic(c.output() / "label_fractions.csv", fractions);
  log << "label: " << segs.size() << " segments over " << by_policy.size() << " policies, " << space.size()
      << " labels after exclusions\n";
  return kSuccess;
}

// ------------------------------------------------------------------ compare

int cmd_compare(const RunConfig& c, const std::string& term_name, const std::string& metric, YearMonth before,
                YearMonth after, std::ostream& log) {
  auto terms = terms_for(c);
  auto term = std::find_if(terms.begin(), terms.end(), [&](const TermSpec& t) {
    return to_lower(t.canonical_name) == to_lower(term_name);
  });
  if (term == terms.end()) throw ConfigError("unknown term \"" + term_name + "\"");
  metric_value(PolicyMetrics{}, metric);  // validates the name

  auto store = open_corpus_or_throw(c);
  auto t = build_timelines(store);
  std::map<std::string, std::vector<bool>> site_mentions;
  for (const auto& [site, versions] : t.texts)
    for (const auto& v : versions) site_mentions[site].push_back(mentions(v.text, *term));
  auto cohorts = cohort_split(site_mentions);
  auto metrics = compute_all(c, store.uniques());

  ordered_json j{{"term", term->canonical_name},
                 {"metric", metric},
                 {"before", before.to_string()},
                 {"after", after.to_string()}};
  for (const auto& [name, sites] :
       {std::pair{"mentions", &cohorts.mentions}, std::pair{"non_mentions", &cohorts.non_mentions}}) {
    auto a = in_force_values(t, metrics, before, metric, sites);
    auto b = in_force_values(t, metrics, after, metric, sites);
    ordered_json r{{"sites", sites->size()}, {"n_before", a.size()}, {"n_after", b.size()}};
    try {
      auto w = welch(a, b);
      r["computable"] = true;
      r["mean_before"] = w.mean_a;
      r["mean_after"] = w.mean_b;
      r["mean_delta"] = w.mean_b - w.mean_a;
      r["t"] = w.t;
      r["df"] = w.df;
      r["p_value"] = w.p_value;
      r["cohens_d"] = w.cohens_d;
    } catch (const std::exception& e) {
      r["computable"] = false;
      r["reason"] = e.what();
    }
    j[name] = r;
  }
  fs::create_directories(c.output());
  auto file = c.output() / ("compare_" + metric + "_" + before.to_string() + "_" + after.to_string() + ".json");
  write_file_atomic(file, j.dump(2) + "\n");
  log << j.dump(2) << "\n";
  return kSuccess;
}

// ------------------------------------------------------------------- report

int cmd_report(const RunConfig& c, std::ostream& log) {
  auto store = open_corpus_or_throw(c);
  auto snaps = store.snapshots();
  auto uniques = store.uniques();
  auto t = build_timelines(store);

  ordered_json j;
  std::set<std::string> sites;
  long passed = 0, partial = 0, pdf = 0;
  std::map<int, std::pair<long, long>> per_year;  // snapshots, new uniques
  for (const auto& s : snaps) {
    sites.insert(s.site);
    passed += s.gate.passed;
    partial += s.partial;
    pdf += s.link.is_pdf;
    ++per_year[s.archive_timestamp.year].first;
  }
  for (const auto& u : uniques) ++per_year[u.first_seen.year].second;
  j["sites"] = sites.size();
  j["snapshots"] = snaps.size();
  j["snapshots_passing_gate"] = passed;
  j["snapshots_partial"] = partial;
  j["pdf_links"] = pdf;
  j["unique_texts"] = uniques.size();
  if (!t.empty()) j["months"] = {t.first.to_string(), t.last.to_string()};
  ordered_json years = ordered_json::array();
  for (const auto& [y, counts] : per_year)
    years.push_back({{"year", y}, {"snapshots", counts.first}, {"new_unique_texts", counts.second}});
  j["per_year"] = years;

  // Counting-strategy agreement: FRE under the canonical configuration
  // against whitespace words with regex sentences.
  if (uniques.size() >= 2) {
    CountingConfig alt;
    alt.word_strategy = WordStrategy::whitespace_split;
    alt.sentence_strategy = SentenceStrategy::regex;
    std::vector<double> a, b;
    for (const auto& u : uniques) {
      try {
        double fa = readability(count(u.text, c.counting)).fre;
        double fb = readability(count(u.text, alt)).fre;
        a.push_back(fa);
        b.push_back(fb);
      } catch (const std::exception&) {
      }
    }
    try {
      j["fre_spearman_canonical_vs_regex"] = spearman_rank_corr(a, b);
    } catch (const std::exception& e) {
      j["fre_spearman_canonical_vs_regex"] = nullptr;
    }
  }
  fs::create_directories(c.output());
  write_file_atomic(c.output() / "report.json", j.dump(2) + "\n");
  log << j.dump(2) << "\n";
  return kSuccess;
}

}  // namespace privlens::cli
