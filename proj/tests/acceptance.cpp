// Acceptance run: one line per criterion, PASS / FAIL / BLOCKED.
//
//   acceptance [--expect-fail ID,ID,...]
//
// Exit status is non-zero when a criterion FAILs that was not listed, or a
// listed one no longer fails. BLOCKED never affects the status.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <json.hpp>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "archive_fixture.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"
#include "pipeline.hpp"
#include "privlens/content_classifier.hpp"
#include "privlens/csv.hpp"
#include "privlens/extraction.hpp"
#include "privlens/segmenter.hpp"
#include "privlens/stats.hpp"
#include "privlens/text_metrics.hpp"

using namespace privlens;
using namespace privlens::cli;
using json = nlohmann::json;
using Clock = std::chrono::steady_clock;

namespace {

enum class Status { pass, fail, blocked };

struct Outcome {
  Status status = Status::pass;
  std::string detail;
};

// Collects failed checks; the first few are kept for the report line.
struct Checks {
  long total = 0;
  long failed = 0;
  std::vector<std::string> notes;

  bool operator()(bool ok, const std::string& what) {
    ++total;
    if (!ok) {
      ++failed;
      if (notes.size() < 3) notes.push_back(what);
    }
    return ok;
  }

  Outcome outcome(const std::string& summary) const {
    Outcome o;
    o.status = failed ? Status::fail : Status::pass;
    o.detail = summary + " (" + std::to_string(total - failed) + "/" + std::to_string(total) + " checks)";
    for (const auto& n : notes) o.detail += "; " + n;
    return o;
  }
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(double v, int prec = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", prec, v);
  return buf;
}

fs::path test_data() { return PRIVLENS_TEST_DATA; }
fs::path share_data() { return PRIVLENS_SHARE_DATA; }

struct Passage {
  std::string id;
  std::string text;
  std::vector<std::string> sentences;
  json counts;
};

// Paragraphs separated by blank lines, sentences by spaces.
std::vector<Passage> load_passages() {
  auto passages = json::parse(read_file(test_data() / "counting" / "passages.json"));
  auto counts = json::parse(read_file(test_data() / "counting" / "counts.json"));
  std::vector<Passage> out;
  for (const auto& p : passages) {
    Passage x;
    x.id = p["id"];
    for (const auto& para : p["paragraphs"]) {
      if (!x.text.empty()) x.text += "\n\n";
      std::string joined;
      for (const auto& s : para) {
        if (!joined.empty()) joined += ' ';
        joined += s.get<std::string>();
        x.sentences.push_back(s);
      }
      x.text += joined;
    }
    for (const auto& c : counts)
      if (c["id"] == x.id) x.counts = c;
    out.push_back(std::move(x));
  }
  return out;
}

double rel_dev(double got, double want) { return std::fabs(got - want) / want; }

// --- 1 ---------------------------------------------------------------------

Outcome formula_arithmetic() {
  Checks check;
  auto t0 = Clock::now();
  auto passages = load_passages();
  for (const auto& p : passages) {
    const auto& k = p.counts;
    TextCounts c;
    c.words = k["words"];
    c.sentences = k["sentences"];
    c.syllables = k["syllables"];
    c.characters = k["characters"];
    c.polysyllables = k["polysyllables"];
    c.difficult_words = k["difficult_words"];
    c.complex_words = k["complex_words"];
    auto r = readability(c, {.force_smog = true, .dale_chall = true});

    const double W = c.words, S = c.sentences, Y = c.syllables, C = c.characters;
    const double fre = 206.835 - 1.015 * (W / S) - 84.6 * (Y / W);
    const double fkg = 0.39 * (W / S) + 11.8 * (Y / W) - 15.59;
    const double ari = 4.71 * (C / W) + 0.5 * (W / S) - 21.43;
    // Coleman-Liau from letters and sentences per 100 words.
    const double L = C / W * 100, S100 = S / W * 100;
    const double cl = 0.0588 * L - 0.296 * S100 - 15.8;
    const double smog = 1.0430 * std::sqrt(c.polysyllables * (30.0 / S)) + 3.1291;
    const double dc = 0.1579 * (c.difficult_words / W * 100) + 0.0496 * (W / S);
    const double gf = 0.4 * ((W / S) + 100.0 * (c.complex_words / W));

    auto near = [&](double got, double want, const char* name) {
      check(std::fabs(got - want) <= 1e-9, p.id + " " + name + " " + fmt(got, 12) + " vs " + fmt(want, 12));
    };
    near(r.fre, fre, "FRE");
    near(r.fkg, fkg, "FKG");
    near(r.ari, ari, "ARI");
    near(r.cl, cl, "CL");
    check(r.smog.has_value(), p.id + " SMOG missing");
    if (r.smog) near(*r.smog, smog, "SMOG");
    check(r.dc.has_value(), p.id + " DC missing");
    if (r.dc) near(*r.dc, dc, "DC");
    near(r.gf, gf, "GF");
  }
  double secs = seconds_since(t0);
  check(passages.size() >= 10, "fewer than 10 passages");
  check(secs < 1.0, "runtime " + fmt(secs) + " s");
  return check.outcome(std::to_string(passages.size()) + " passages x 7 formulas, " + fmt(secs, 3) + " s");
}

// --- 2 ---------------------------------------------------------------------

Outcome counting_accuracy() {
  Checks check;
  double worst[4] = {0, 0, 0, 0};
  const double band[4] = {0.02, 0.10, 0.05, 0.02};
  const char* names[4] = {"words", "sentences", "syllables", "characters"};
  for (const auto& p : load_passages()) {
    auto c = count(p.text);
    const double got[4] = {double(c.words), double(c.sentences), double(c.syllables), double(c.characters)};
    for (int i = 0; i < 4; ++i) {
      double d = rel_dev(got[i], p.counts[names[i]].get<double>());
      worst[i] = std::max(worst[i], d);
      check(d <= band[i], p.id + " " + names[i] + " " + fmt(got[i], 0) + " vs " +
                              fmt(p.counts[names[i]].get<double>(), 0));
    }
  }
  std::string summary = "max deviation";
  for (int i = 0; i < 4; ++i) summary += std::string(" ") + names[i] + " " + fmt(100 * worst[i], 1) + "%";
  return check.outcome(summary);
}

// --- 3 ---------------------------------------------------------------------

Outcome strategy_comparison() {
  Checks check;
  auto passages = load_passages();
  CountingConfig regex;
  regex.sentence_strategy = SentenceStrategy::regex;
  long manual = 0, by_regex = 0, by_tokenizer = 0;
  for (const auto& p : passages) {
    long want = p.counts["sentences"];
    long tok = count(p.text).sentences;
    manual += want;
    by_regex += count(p.text, regex).sentences;
    by_tokenizer += tok;
    check(rel_dev(double(tok), double(want)) <= 0.10, p.id + " tokenizer sentences out of band");
  }
  check(by_regex < manual, "regex does not under-count: " + std::to_string(by_regex) + " vs " +
                               std::to_string(manual));

  // Word and sentence counting already match the manual counts, so the two
  // syllable counters are what separates the remaining strategies. Each runs
  // with tokenizer words and sentences.
  CountingConfig vowels, hyphen;
  hyphen.syllable_strategy = SyllableStrategy::hyphenation_dict;
  hyphen.hyphenation = std::make_shared<HyphenationDict>(
      HyphenationDict::load(share_data() / "hyphenation" / "en_us.txt"));

  // Synthetic corpus: fixture sentences ordered by length; each passage
  // draws from a window of that order, so passages differ in style the way
  // real policies do. A uniform-draw corpus is reported alongside.
  std::vector<std::string> pool;
  for (const auto& p : passages)
    for (const auto& s : p.sentences)
      if (!s.empty() && (s.back() == '.' || s.back() == '?' || s.back() == '!')) pool.push_back(s);
  auto length = [](const std::string& s) { return std::count(s.begin(), s.end(), ' '); };
  std::stable_sort(pool.begin(), pool.end(),
                   [&](const std::string& a, const std::string& b) { return length(a) < length(b); });
  auto rho_over = [&](bool windowed) {
    std::mt19937 rng(1);
    std::vector<double> fre_a, fre_b;
    const std::size_t window = pool.size() / 4;
    for (int i = 0; i < 50; ++i) {
      std::size_t start = windowed ? rng() % (pool.size() - window) : 0;
      std::size_t span = windowed ? window : pool.size();
      int n = 8 + static_cast<int>(rng() % 13);
      std::string text;
      for (int k = 0; k < n; ++k) text += pool[start + rng() % span] + (k % 4 == 3 ? "\n\n" : " ");
      fre_a.push_back(readability(count(text, vowels)).fre);
      fre_b.push_back(readability(count(text, hyphen)).fre);
    }
    return spearman_rank_corr(fre_a, fre_b);
  };
  double rho = rho_over(true), rho_uniform = rho_over(false);
  check(rho >= 0.95, "spearman " + fmt(rho));
  return check.outcome("sentences manual " + std::to_string(manual) + ", tokenizer " +
                       std::to_string(by_tokenizer) + ", regex " + std::to_string(by_regex) +
                       "; FRE rho vowel groups vs hyphenation " + fmt(rho) + " (uniform draws " +
                       fmt(rho_uniform) + ")");
}

// --- 4 ---------------------------------------------------------------------

std::size_t brute_quantile(const std::vector<double>& pmf, double q) {
  double acc = 0;
  for (std::size_t k = 0; k < pmf.size(); ++k) {
    acc += pmf[k];
    if (acc >= q) return k;
  }
  return pmf.size() - 1;
}

Outcome poisson_binomial() {
  Checks check;
  auto t0 = Clock::now();
  std::mt19937 rng(4);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0;
  for (int trial = 0; trial < 200; ++trial) {
    std::size_t n = 1 + rng() % 15;
    std::vector<double> p(n);
    for (auto& x : p) {
      x = u(rng);
      if (trial % 10 == 0) x = std::round(x);  // include 0/1 mass
    }
    PoissonBinomial dist(p);
    auto brute = oracle::brute_force_pmf(p);
    for (std::size_t k = 0; k <= n; ++k) {
      double d = std::fabs(dist.pmf()[k] - brute[k]);
      worst = std::max(worst, d);
      check(d <= 1e-12, "pmf entry off by " + std::to_string(d));
    }
    auto iv = prediction_interval(dist);
    check(iv.low == brute_quantile(brute, 0.025) && iv.high == brute_quantile(brute, 0.975),
          "interval mismatch at n=" + std::to_string(n));
  }
  double secs = seconds_since(t0);
  check(secs < 5.0, "runtime " + fmt(secs) + " s");
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1e", worst);
  return check.outcome("200 vectors, max |pmf error| " + std::string(buf) + ", " + fmt(secs, 3) + " s");
}

// --- 5 ---------------------------------------------------------------------

Outcome statistics() {
  Checks check;
  std::mt19937 rng(5);
  std::normal_distribution<double> z(0.0, 1.0);
  auto near = [&](double a, double b, const std::string& what) {
    check(std::fabs(a - b) <= 1e-8 * std::max(1.0, std::fabs(b)), what + " " + fmt(a, 12) + " vs " + fmt(b, 12));
  };
  for (int trial = 0; trial < 100; ++trial) {
    std::size_t na = 2 + rng() % 19, nb = 2 + rng() % 19;
    double shift = z(rng), scale = 0.5 + std::fabs(z(rng));
    std::vector<double> a(na), b(nb);
    for (auto& x : a) x = z(rng) * scale + shift;
    for (auto& x : b) x = z(rng);
    auto got = welch(a, b);
    auto want = oracle::welch(a, b);
    near(got.t, want.t, "t");
    near(got.df, want.df, "df");
    near(got.p_value, want.p, "p");
    near(got.cohens_d, want.d, "d");

    std::vector<double> x(na), y(na);
    for (std::size_t i = 0; i < na; ++i) {
      x[i] = z(rng);
      y[i] = 0.6 * x[i] + z(rng);
      if (trial % 5 == 0) x[i] = std::round(x[i]);  // ties
    }
    if (std::all_of(x.begin(), x.end(), [&](double v) { return v == x[0]; })) x[0] += 1;
    near(pearson(x, y), oracle::pearson(x, y), "pearson");
    near(spearman_rank_corr(x, y), oracle::spearman(x, y), "spearman");
  }
  return check.outcome("100 samples: Welch t/df/p, Cohen's d, Pearson, Spearman");
}

// --- 6 ---------------------------------------------------------------------

Outcome stratification() {
  Checks check;
  std::mt19937 rng(6);
  const std::vector<double> ratios = {3, 1, 1};
  double worst = 0;
  for (int trial = 0; trial < 50; ++trial) {
    int n = 10 + static_cast<int>(rng() % 91), L = 1 + static_cast<int>(rng() % 8);
    LabelMatrix y(n, std::vector<std::uint8_t>(L));
    for (auto& row : y) {
      int k = static_cast<int>(rng() % 3);  // 0-2 labels per row
      for (int j = 0; j < k; ++j) row[rng() % L] = 1;
    }
    auto folds = iterative_stratified_split(y, ratios, trial);
    check(folds == iterative_stratified_split(y, ratios, trial), "same seed, different split");
    for (int l = 0; l < L; ++l) {
      std::vector<int> per(3);
      int total = 0;
      for (int i = 0; i < n; ++i)
        if (y[i][l]) {
          ++per[folds[i]];
          ++total;
        }
      for (int j = 0; j < 3; ++j) {
        double d = std::fabs(per[j] - oracle::ideal_count(total, ratios[j], 5));
        worst = std::max(worst, d);
        check(d <= 1.0, "trial " + std::to_string(trial) + " label " + std::to_string(l) + " fold " +
                            std::to_string(j) + " off by " + fmt(d, 2));
      }
    }
  }
  return check.outcome("50 multi-label fixtures, worst per-fold deviation " + fmt(worst, 2));
}

// --- 7 ---------------------------------------------------------------------

Outcome consolidation() {
  Checks check;
  std::mt19937 rng(7);
  const char* pool[] = {"Alpha", "alpha", "ALPHA", "Beta", "beta", "Gamma", "Delta", "delta", "Eps"};
  for (int trial = 0; trial < 1000; ++trial) {
    int annotators = 1 + static_cast<int>(rng() % 5);
    int min_agree = 1 + static_cast<int>(rng() % 3);
    AnnotatedSegment seg;
    std::vector<std::vector<std::string>> raw;
    for (int a = 0; a < annotators; ++a) {
      std::vector<std::string> mine;
      auto& labels = seg.annotator_labels[std::to_string(a)];
      int k = static_cast<int>(rng() % 5);
      for (int i = 0; i < k; ++i) {
        std::string l = pool[rng() % 9];
        mine.push_back(l);
        labels.insert(Label::category(l));
      }
      raw.push_back(mine);
    }
    std::set<std::string> got;
    for (const auto& l : consolidate(seg, min_agree)) {
      std::string key = l.name;
      for (auto& c : key) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
      got.insert(key);
    }
    check(got == oracle::vote(raw, min_agree), "vote mismatch in trial " + std::to_string(trial));
  }

  auto schema = LabelSchema::opp115();
  const auto& all = schema.labels();
  for (int trial = 0; trial < 1000; ++trial) {
    LabelSet s;
    for (const auto& l : all)
      if (rng() % 8 == 0) s.insert(l);
    auto v = encode_multilabel(s, schema);
    check(v.size() == schema.size(), "encoded width");
    check(decode_multilabel(v, schema) == s, "round trip");
  }
  return check.outcome("1000 vote sets against counting oracle, 1000 encode/decode round trips");
}

// --- 8 ---------------------------------------------------------------------

bool is_partition(const std::vector<std::pair<int, int>>& spans, int n) {
  if (spans.empty() || spans.front().first != 0 || spans.back().second != n) return false;
  for (std::size_t i = 0; i < spans.size(); ++i) {
    if (spans[i].first >= spans[i].second) return false;
    if (i && spans[i].first != spans[i - 1].second) return false;
  }
  return true;
}

Outcome segmenter() {
  Checks check;
  std::vector<std::string> vocab;
  for (int i = 0; i < 12; ++i) vocab.push_back("w" + std::to_string(i));
  EmbeddingTable emb(12);
  for (int i = 0; i < 12; ++i) {
    std::vector<float> v(12, 0.0f);
    v[i] = 1.0f;
    emb.set(vocab[i], v);
  }
  std::mt19937 rng(8);
  for (int trial = 0; trial < 100; ++trial) {
    int na = 1 + static_cast<int>(rng() % 8), nb = 1 + static_cast<int>(rng() % 8);
    std::string text;
    for (int i = 0; i < na + nb; ++i) {
      int base = i < na ? 0 : 6;
      text += "W" + std::to_string(base) + " w" + std::to_string(base) + " w" +
              std::to_string(base + static_cast<int>(rng() % 6)) + ". ";
    }
    auto segs = segment(text, emb);
    bool ok = segs.size() == 2 && segs[0].sentence_begin == 0 && segs[0].sentence_end == na &&
              segs[1].sentence_begin == na && segs[1].sentence_end == na + nb;
    check(ok, "two-block document " + std::to_string(na) + "+" + std::to_string(nb) + " gave " +
                  std::to_string(segs.size()) + " segments");
  }

  for (int trial = 0; trial < 100; ++trial) {
    int n = 1 + static_cast<int>(rng() % 14);
    std::vector<std::vector<double>> w(n, std::vector<double>(n, 0));
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) w[i][j] = w[j][i] = (rng() % 1000) / 1000.0;
    std::vector<std::pair<int, int>> prev;
    for (int step = 0; step <= 10; ++step) {
      double t = step / 10.0;
      std::vector<std::vector<int>> adj(n);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          if (i != j && w[i][j] >= t) adj[i].push_back(j);
      auto spans = clique_partition(n, maximal_cliques(adj), 1);
      check(is_partition(spans, n), "not a partition");
      if (!prev.empty()) check(spans.size() >= prev.size(), "raising the threshold merged segments");
      prev = spans;
    }
  }
  return check.outcome("100 two-block documents, 100 random graphs x 11 thresholds");
}

// --- 9 ---------------------------------------------------------------------

LabelMatrix predict(const ModelBundle& b, const std::vector<LabeledSegment>& segs,
                    const std::vector<Label>& space) {
  LabelMatrix out;
  for (const auto& s : segs) {
    auto labels = label_segment(s.text, b).labels();
    std::vector<std::uint8_t> row;
    for (const auto& l : space) row.push_back(labels.count(l) > 0);
    out.push_back(row);
  }
  return out;
}

std::vector<std::string> names_of(const std::vector<Label>& space) {
  std::vector<std::string> n;
  for (const auto& l : space) n.push_back(l.display());
  return n;
}

Outcome classifier_separable() {
  Checks check;
  auto schema = fixtures::separable_schema();
  auto train = fixtures::separable_corpus(200, 1);
  auto test = fixtures::separable_corpus(200, 2);
  auto bundle = train_hierarchy(train, schema, LinearBackend::factory());
  auto cats = schema.category_labels();
  std::vector<Label> attrs;
  for (const auto& a : schema.attributes())
    for (const auto& l : schema.attribute_labels(a.name)) attrs.push_back(l);
  double top = evaluate(label_matrix(test, cats), predict(bundle, test, cats), names_of(cats)).micro_f1;
  double att = evaluate(label_matrix(test, attrs), predict(bundle, test, attrs), names_of(attrs)).micro_f1;
  check(top >= 0.95, "top-level micro-F1 " + fmt(top));
  check(att >= 0.9, "attribute micro-F1 " + fmt(att));
  return check.outcome("separable corpus: top-level micro-F1 " + fmt(top) + ", attributes " + fmt(att));
}

Outcome classifier_real() {
  const char* dir = std::getenv("PRIVLENS_OPP115_DIR");
  if (!dir || !*dir)
    return {Status::blocked, "annotated policy corpus not available; set PRIVLENS_OPP115_DIR to run"};
  Checks check;
  auto schema = LabelSchema::opp115();
  auto segs = consolidate_all(load_opp115(dir, 20), schema, 2);
  auto cats = schema.category_labels();
  auto split = stratified_split(segs, cats, 1);
  std::vector<LabeledSegment> train, test;
  for (std::size_t i = 0; i < segs.size(); ++i)
    (split.subset[i] == Subset::train ? train : split.subset[i] == Subset::test ? test : train)
        .push_back(segs[i]);
  auto bundle = train_hierarchy(train, schema, LinearBackend::factory());
  double top = evaluate(label_matrix(test, cats), predict(bundle, test, cats), names_of(cats)).micro_f1;
  check(top >= 0.6, "top-level micro-F1 " + fmt(top));
  return check.outcome(std::to_string(segs.size()) + " segments, top-level micro-F1 " + fmt(top));
}

// --- 10 --------------------------------------------------------------------

int word_oracle(const std::vector<std::string>& paras) {
  int n = 0;
  for (const auto& p : paras) {
    std::istringstream in(p);
    for (std::string w; in >> w;)
      n += std::any_of(w.begin(), w.end(), [](unsigned char ch) { return std::isalnum(ch); });
  }
  return n;
}

std::map<fs::path, std::string> snapshot_files(const fs::path& root) {
  std::map<fs::path, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(root))
    if (e.is_regular_file()) out[e.path()] = read_file(e.path());
  return out;
}

Outcome end_to_end() {
  Checks check;
  auto t0 = Clock::now();
  archive_fixture::Archive archive;
  FixtureServer fx;
  archive.install(fx);
  fx.start();

  fs::path root = fs::temp_directory_path() / "privlens_acceptance_e2e";
  fs::remove_all(root);
  fs::create_directories(root);
  RunConfig c;
  c.corpus_dir = root / "corpus";
  c.site_list = root / "sites.txt";
  write_file_atomic(c.site_list, "alpha.example\nbeta.example\ngamma.example\n");
  c.archive_base_url = fx.base_url();
  c.fetch.min_delay_between_requests = 0;
  c.fetch.max_retries = 0;
  c.fetch.timeout = 10;
  c.landing_schedule.monthly_start = {2019, 1};
  c.landing_schedule.quarterly_range = {2009, 2018};
  c.crawl_end = {2020, 12};

  std::ostringstream log;
  auto run_all = [&] {
    return cmd_crawl(c, log) == kSuccess && cmd_metrics(c, log) == kSuccess && cmd_terms(c, log) == kSuccess &&
           cmd_report(c, log) == kSuccess;
  };
  if (!check(run_all(), "a pipeline command failed")) {
    fs::remove_all(root);
    return check.outcome("pipeline did not complete");
  }

  CorpusStore store(c.corpus_dir);
  check(store.uniques().size() == archive_fixture::Archive::kUniqueTexts,
        "unique texts " + std::to_string(store.uniques().size()));

  auto words = csv::parse(read_file(c.output() / "series" / "words.csv"));
  auto months = archive.months();
  check(words.size() == months.size() + 1, "word series length");
  for (std::size_t i = 0; i < months.size() && i + 1 < words.size(); ++i) {
    double expect = 0;
    for (const auto& [site, versions] : archive.in_force()) expect += word_oracle(versions[i]);
    expect /= 3;
    check(std::fabs(std::stod(words[i + 1][1]) - expect) <= 1e-9 * expect, "word series at " + words[i + 1][0]);
  }

  auto rates = csv::parse(read_file(c.output() / "update_rate.csv"));
  for (std::size_t r = 1; r < rates.size(); ++r) {
    bool change = rates[r][0] == "2019-06" || rates[r][0] == "2020-01";
    check(rates[r][1] == (change ? "1" : "0"), "update rate at " + rates[r][0]);
  }

  int steps = 0;
  for (const auto& row : csv::parse(read_file(c.output() / "terms.csv"))) {
    if (row[0] != "GDPR") continue;
    auto ym = YearMonth::parse(row[1]);
    check(ym && std::fabs(std::stod(row[2]) - (ym->year == 2019 ? 1.0 / 3 : 2.0 / 3)) <= 1e-9,
          "GDPR series at " + row[1]);
    ++steps;
  }
  check(steps == 24, "GDPR series length");

  auto before = snapshot_files(c.corpus_dir);
  check(run_all(), "rerun failed");
  check(snapshot_files(c.corpus_dir) == before, "rerun changed output files");
  fx.stop();
  fs::remove_all(root);

  double secs = seconds_since(t0);
  check(secs < 120.0, "runtime " + fmt(secs) + " s");
  return check.outcome("3 sites x 24 months, " + std::to_string(before.size()) + " output files, " +
                       fmt(secs, 2) + " s");
}

// --- 11 --------------------------------------------------------------------

std::string english_words(std::size_t n) {
  static const char* kWords[] = {"we", "collect", "the", "information", "you", "provide", "to",
                                 "us", "and", "use", "it", "for", "our", "services", "of", "a"};
  std::string out;
  for (std::size_t i = 0; i < n; ++i) {
    if (i) out += ' ';
    out += kWords[i % 16];
  }
  return out;
}

std::vector<PolicyClassifier> fixed(std::vector<double> p) {
  const double thresholds[] = {0.9, 0.6, 0.1};
  std::vector<PolicyClassifier> out;
  for (std::size_t i = 0; i < p.size(); ++i)
    out.push_back({[v = p[i]](std::string_view) { return v; }, thresholds[i]});
  return out;
}

Outcome gate_behavior() {
  Checks check;
  const auto text = english_words(500);
  check(gate(text, fixed({0.95, 0.7, 0.2})).passed, "[0.95, 0.7, 0.2] should pass");
  check(!gate(text, fixed({0.1, 0.1, 0.05})).passed, "[0.1, 0.1, 0.05] should fail");
  check(!gate(english_words(50), fixed({0.95, 0.7, 0.2})).passed, "50 words should fail");
  check(!gate(english_words(99), {}).passed, "99 words should fail");
  check(gate(english_words(100), {}).passed, "100 words should pass");
  check(gate(english_words(99), {}).word_count == 99, "99-word count");
  return check.outcome("threshold examples and the 99/100-word boundary");
}

}  // namespace

int main(int argc, char** argv) {
  std::set<std::string> expected;
  for (int i = 1; i < argc; ++i) {
    std::string arg = argv[i];
    if (arg == "--expect-fail" && i + 1 < argc) {
      std::stringstream ids(argv[++i]);
      for (std::string id; std::getline(ids, id, ',');) expected.insert(id);
    } else {
      std::fprintf(stderr, "usage: acceptance [--expect-fail ID,ID,...]\n");
      return 2;
    }
  }
  struct Criterion {
    const char* id;
    const char* name;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria = {
      {"1", "formula arithmetic", formula_arithmetic},
      {"2", "counting accuracy", counting_accuracy},
      {"3", "counting strategy comparison", strategy_comparison},
      {"4", "poisson-binomial", poisson_binomial},
      {"5", "statistics", statistics},
      {"6", "iterative stratification", stratification},
      {"7", "consolidation and encoding", consolidation},
      {"8", "segmenter", segmenter},
      {"9a", "classifier, separable corpus", classifier_separable},
      {"9b", "classifier, annotated policies", classifier_real},
      {"10", "pipeline end to end", end_to_end},
      {"11", "gate behavior", gate_behavior},
  };
  int unexpected = 0, passed = 0, failed = 0, blocked = 0;
  for (const auto& c : criteria) {
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {Status::fail, std::string("exception: ") + e.what()};
    }
    const char* tag = o.status == Status::pass ? "PASS" : o.status == Status::fail ? "FAIL" : "BLOCKED";
    const bool listed = expected.count(c.id) > 0;
    passed += o.status == Status::pass;
    failed += o.status == Status::fail;
    blocked += o.status == Status::blocked;
    std::string note;
    if (o.status == Status::fail && listed) note = " [expected]";
    if (o.status == Status::pass && listed) note = " [listed as expected to fail]";
    unexpected += (o.status == Status::fail) != listed && o.status != Status::blocked;
    std::printf("[%s] %s %s: %s%s\n", tag, c.id, c.name, o.detail.c_str(), note.c_str());
    std::fflush(stdout);
  }
  std::printf("%d passed, %d failed, %d blocked\n", passed, failed, blocked);
  return unexpected ? 1 : 0;
}
