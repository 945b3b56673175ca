#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "privlens/archive_client.hpp"
#include "privlens/text_metrics.hpp"

namespace privlens::cli {

namespace fs = std::filesystem;

struct GateModel {
  fs::path path;
  double threshold = 0.5;
};

struct RunConfig {
  fs::path corpus_dir = "corpus";
  fs::path output_dir;  // defaults to <corpus_dir>/analysis
  fs::path site_list;

  std::string archive_base_url = "http://web.archive.org";
  SnapshotSchedule landing_schedule;
  // Last month crawled; policy snapshots are taken monthly up to here.
  YearMonth crawl_end{2021, 12};
  FetchPolicy fetch;
  int workers = 4;

  // Word lists; empty paths fall back to the built-in lists where one exists.
  fs::path familiar_words;
  fs::path obfuscating_words;
  fs::path stop_words;
  fs::path irregular_participles;
  fs::path hyphenation;
  fs::path terms;

  CountingConfig counting;

  std::size_t gate_min_words = 100;
  std::vector<GateModel> gate_models;
  fs::path gate_training_dir;

  fs::path schema;  // empty: built-in label schema
  fs::path annotations_dir;
  fs::path bundle_dir;  // defaults to <output_dir>/bundle
  std::vector<double> split_ratios{3, 1, 1};
  int min_agree = 2;
  double min_precision = 0.75;
  double label_threshold = 0.5;

  fs::path embeddings;  // trained from the corpus when missing
  int embedding_dimension = 100;
  int embedding_min_count = 2;
  int embedding_epochs = 5;
  double segment_threshold = 0.25;
  int segment_min_size = 1;

  std::uint64_t seed = 1;

  fs::path output() const { return output_dir.empty() ? corpus_dir / "analysis" : output_dir; }
  fs::path bundle() const { return bundle_dir.empty() ? output() / "bundle" : bundle_dir; }
};

// JSON file; relative paths inside it resolve against the file's directory.
// Unknown keys are rejected. Throws ConfigError.
RunConfig load_config(const fs::path& file);
RunConfig parse_config(const std::string& json_text, const fs::path& base_dir = {});
std::string dump_config(const RunConfig& config);

}  // namespace privlens::cli
