#include <CLI11.hpp>
#include <iostream>

#include "config.hpp"
#include "pipeline.hpp"
#include "privlens/error.hpp"

using namespace privlens;
using namespace privlens::cli;

namespace {

struct Overrides {
  std::string config;
  std::string corpus, output, sites, archive, terms, bundle, annotations, embeddings, schema;
  std::optional<std::uint64_t> seed;
  std::optional<int> workers;
  std::optional<double> threshold, min_delay, timeout;
  std::string counting_preset;

  RunConfig apply() const {
    RunConfig c = config.empty() ? RunConfig{} : load_config(config);
    if (!corpus.empty()) c.corpus_dir = corpus;
    if (!output.empty()) c.output_dir = output;
    if (!sites.empty()) c.site_list = sites;
    if (!archive.empty()) c.archive_base_url = archive;
    if (!terms.empty()) c.terms = terms;
    if (!bundle.empty()) c.bundle_dir = bundle;
    if (!annotations.empty()) c.annotations_dir = annotations;
    if (!embeddings.empty()) c.embeddings = embeddings;
    if (!schema.empty()) c.schema = schema;
    if (seed) c.seed = *seed;
    if (workers) c.workers = *workers;
    if (threshold) c.label_threshold = *threshold;
    if (min_delay) c.fetch.min_delay_between_requests = *min_delay;
    if (timeout) c.fetch.timeout = *timeout;
    c.fetch.validate();
    if (c.workers < 1) throw ConfigError("--workers must be >= 1");
    return c;
  }
};

void add_common(CLI::App* cmd, Overrides& o) {
  cmd->add_option("-c,--config", o.config, "JSON run configuration")->check(CLI::ExistingFile);
  cmd->add_option("--corpus", o.corpus, "corpus directory");
  cmd->add_option("--output", o.output, "analysis output directory (default <corpus>/analysis)");
  cmd->add_option("--seed", o.seed, "seed for splits and embedding training");
  cmd->add_option("--workers", o.workers, "worker threads");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"privlens: longitudinal privacy-policy analysis"};
  app.require_subcommand(1);
  Overrides o;
  bool gate = false;
  std::string html_dir, term, metric = "words", before, after;
  bool print_config = false;

  auto* crawl = app.add_subcommand("crawl", "fetch landing pages and policies from the web archive");
  add_common(crawl, o);
  crawl->add_option("--sites", o.sites, "site list, one domain per line");
  crawl->add_option("--archive", o.archive, "archive base URL");
  crawl->add_option("--min-delay", o.min_delay, "seconds between requests to one host");
  crawl->add_option("--timeout", o.timeout, "per-request timeout in seconds");

  auto* extract = app.add_subcommand("extract", "extract and gate policy text from local HTML files");
  add_common(extract, o);
  extract->add_option("html_dir", html_dir, "directory of .html files")->required();

  auto* metrics = app.add_subcommand("metrics", "length, readability, obfuscation and passive-voice metrics");
  add_common(metrics, o);

  auto* terms = app.add_subcommand("terms", "monthly fraction of policies mentioning tracked terms");
  add_common(terms, o);
  terms->add_option("--terms", o.terms, "term configuration (JSON)");

  auto* seg = app.add_subcommand("segment", "split unique policies into coherent segments");
  add_common(seg, o);
  seg->add_option("--embeddings", o.embeddings, "word embeddings file (trained from the corpus if absent)");

  auto* train = app.add_subcommand("train", "train the content classifier (or the gate models)");
  add_common(train, o);
  train->add_option("--annotations", o.annotations, "directory of annotation CSV files");
  train->add_option("--schema", o.schema, "label schema JSON");
  train->add_option("--bundle", o.bundle, "output bundle directory");
  train->add_option("--threshold", o.threshold, "decision threshold for evaluation");
  train->add_flag("--gate", gate, "train the policy/non-policy gate classifiers");

  auto* label = app.add_subcommand("label", "label segments and build label time series");
  add_common(label, o);
  label->add_option("--bundle", o.bundle, "trained bundle directory");
  label->add_option("--threshold", o.threshold, "decision threshold");

  auto* compare = app.add_subcommand("compare", "compare a metric between two months by term cohort");
  add_common(compare, o);
  compare->add_option("--term", term, "term whose mention splits the cohorts")->required();
  compare->add_option("--metric", metric, "metric column (default words)");
  compare->add_option("--before", before, "YYYY-MM")->required();
  compare->add_option("--after", after, "YYYY-MM")->required();
  compare->add_option("--terms", o.terms, "term configuration (JSON)");

  auto* report = app.add_subcommand("report", "corpus summary");
  add_common(report, o);
  report->add_flag("--print-config", print_config, "print the effective configuration and exit");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : kConfigError;
  }

  try {
    RunConfig c = o.apply();
    auto& log = std::cerr;
    if (*crawl) return cmd_crawl(c, log);
    if (*extract) return cmd_extract(c, html_dir, log);
    if (*metrics) return cmd_metrics(c, log);
    if (*terms) return cmd_terms(c, log);
    if (*seg) return cmd_segment(c, log);
    if (*train) return cmd_train(c, gate, log);
    if (*label) return cmd_label(c, log);
    if (*compare) {
      auto b = YearMonth::parse(before), a = YearMonth::parse(after);
      if (!b || !a) throw ConfigError("--before/--after must be YYYY-MM");
      return cmd_compare(c, term, metric, *b, *a, log);
    }
    if (*report) {
      if (print_config) {
        std::cout << dump_config(c);
        return kSuccess;
      }
      return cmd_report(c, log);
    }
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kPartial;
  }
  return kConfigError;
}
