#include "config.hpp"

#include <json.hpp>
#include <set>

#include "privlens/corpus.hpp"
#include "privlens/error.hpp"

namespace privlens::cli {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

void reject_unknown(const json& obj, const std::set<std::string>& known, const std::string& where) {
  if (!obj.is_object()) throw ConfigError(where + ": expected an object");
  for (const auto& [k, v] : obj.items())
    if (!known.count(k)) throw ConfigError(where + ": unknown key \"" + k + "\"");
}

fs::path path_of(const json& v, const fs::path& base) {
  fs::path p = v.get<std::string>();
  if (p.empty() || p.is_absolute() || base.empty()) return p;
  return (base / p).lexically_normal();
}

YearMonth month_of(const json& v, const std::string& key) {
  auto ym = YearMonth::parse(v.get<std::string>());
  if (!ym) throw ConfigError(key + ": expected YYYY-MM");
  return *ym;
}

YearInterval years_of(const json& v, const std::string& key) {
  if (!v.is_array() || v.size() != 2) throw ConfigError(key + ": expected [first, last]");
  return {v[0].get<int>(), v[1].get<int>()};
}

template <typename E>
E enum_of(const json& v, const std::string& key, std::initializer_list<std::pair<const char*, E>> names) {
  auto s = v.get<std::string>();
  for (const auto& [n, e] : names)
    if (s == n) return e;
  throw ConfigError(key + ": unknown variant \"" + s + "\"");
}

constexpr std::initializer_list<std::pair<const char*, WordStrategy>> kWords = {
    {"tokenizer", WordStrategy::tokenizer}, {"whitespace_split", WordStrategy::whitespace_split}};
constexpr std::initializer_list<std::pair<const char*, SentenceStrategy>> kSentences = {
    {"tokenizer", SentenceStrategy::tokenizer}, {"regex", SentenceStrategy::regex}};
constexpr std::initializer_list<std::pair<const char*, SyllableStrategy>> kSyllables = {
    {"vowel_groups", SyllableStrategy::vowel_groups},
    {"hyphenation_dict", SyllableStrategy::hyphenation_dict}};
constexpr std::initializer_list<std::pair<const char*, CharacterStrategy>> kCharacters = {
    {"per_word_no_punct_no_digits", CharacterStrategy::per_word_no_punct_no_digits},
    {"full_text_no_punct_no_space", CharacterStrategy::full_text_no_punct_no_space}};

template <typename E>
std::string name_of(E e, std::initializer_list<std::pair<const char*, E>> names) {
  for (const auto& [n, v] : names)
    if (v == e) return n;
  return "?";
}

void parse_into(RunConfig& c, const json& j, const fs::path& base) {
  reject_unknown(j,
                 {"corpus_dir", "output_dir", "site_list", "archive", "word_lists", "terms", "counting",
                  "gate", "classifier", "segmenter", "seed"},
                 "config");
  if (j.contains("corpus_dir")) c.corpus_dir = path_of(j["corpus_dir"], base);
  if (j.contains("output_dir")) c.output_dir = path_of(j["output_dir"], base);
  if (j.contains("site_list")) c.site_list = path_of(j["site_list"], base);
  if (j.contains("terms")) c.terms = path_of(j["terms"], base);
  if (j.contains("seed")) c.seed = j["seed"].get<std::uint64_t>();

  if (j.contains("archive")) {
    const auto& a = j["archive"];
    reject_unknown(a,
                   {"base_url", "timeout", "min_delay", "max_retries", "backoff_base", "workers",
                    "schedule", "end"},
                   "archive");
    if (a.contains("base_url")) c.archive_base_url = a["base_url"].get<std::string>();
    if (a.contains("timeout")) c.fetch.timeout = a["timeout"].get<double>();
    if (a.contains("min_delay")) c.fetch.min_delay_between_requests = a["min_delay"].get<double>();
    if (a.contains("max_retries")) c.fetch.max_retries = a["max_retries"].get<int>();
    if (a.contains("backoff_base")) c.fetch.backoff_base = a["backoff_base"].get<double>();
    if (a.contains("workers")) c.workers = a["workers"].get<int>();
    if (a.contains("end")) c.crawl_end = month_of(a["end"], "archive.end");
    if (a.contains("schedule")) {
      const auto& s = a["schedule"];
      reject_unknown(s, {"yearly", "quarterly", "monthly_start"}, "archive.schedule");
      if (s.contains("yearly")) c.landing_schedule.yearly_range = years_of(s["yearly"], "yearly");
      if (s.contains("quarterly")) c.landing_schedule.quarterly_range = years_of(s["quarterly"], "quarterly");
      if (s.contains("monthly_start"))
        c.landing_schedule.monthly_start = month_of(s["monthly_start"], "monthly_start");
    }
  }
  if (j.contains("word_lists")) {
    const auto& w = j["word_lists"];
    reject_unknown(w, {"familiar", "obfuscating", "stop_words", "irregular_participles", "hyphenation"},
                   "word_lists");
    if (w.contains("familiar")) c.familiar_words = path_of(w["familiar"], base);
    if (w.contains("obfuscating")) c.obfuscating_words = path_of(w["obfuscating"], base);
    if (w.contains("stop_words")) c.stop_words = path_of(w["stop_words"], base);
    if (w.contains("irregular_participles")) c.irregular_participles = path_of(w["irregular_participles"], base);
    if (w.contains("hyphenation")) c.hyphenation = path_of(w["hyphenation"], base);
  }
  if (j.contains("counting")) {
    const auto& k = j["counting"];
    reject_unknown(k, {"words", "sentences", "syllables", "characters"}, "counting");
    if (k.contains("words")) c.counting.word_strategy = enum_of(k["words"], "counting.words", kWords);
    if (k.contains("sentences"))
      c.counting.sentence_strategy = enum_of(k["sentences"], "counting.sentences", kSentences);
    if (k.contains("syllables"))
      c.counting.syllable_strategy = enum_of(k["syllables"], "counting.syllables", kSyllables);
    if (k.contains("characters"))
      c.counting.character_strategy = enum_of(k["characters"], "counting.characters", kCharacters);
  }
  if (j.contains("gate")) {
    const auto& g = j["gate"];
    reject_unknown(g, {"min_words", "models", "training_dir"}, "gate");
    if (g.contains("min_words")) c.gate_min_words = g["min_words"].get<std::size_t>();
    if (g.contains("training_dir")) c.gate_training_dir = path_of(g["training_dir"], base);
    if (g.contains("models")) {
      c.gate_models.clear();
      for (const auto& m : g["models"]) {
        reject_unknown(m, {"path", "threshold"}, "gate.models[]");
        c.gate_models.push_back({path_of(m.at("path"), base), m.value("threshold", 0.5)});
      }
    }
  }
  if (j.contains("classifier")) {
    const auto& k = j["classifier"];
    reject_unknown(k, {"schema", "annotations", "bundle", "split", "min_agree", "min_precision", "threshold"},
                   "classifier");
    if (k.contains("schema")) c.schema = path_of(k["schema"], base);
    if (k.contains("annotations")) c.annotations_dir = path_of(k["annotations"], base);
    if (k.contains("bundle")) c.bundle_dir = path_of(k["bundle"], base);
    if (k.contains("split")) c.split_ratios = k["split"].get<std::vector<double>>();
    if (k.contains("min_agree")) c.min_agree = k["min_agree"].get<int>();
    if (k.contains("min_precision")) c.min_precision = k["min_precision"].get<double>();
    if (k.contains("threshold")) c.label_threshold = k["threshold"].get<double>();
  }
  if (j.contains("segmenter")) {
    const auto& s = j["segmenter"];
    reject_unknown(s, {"embeddings", "dimension", "min_count", "epochs", "threshold", "min_size"}, "segmenter");
    if (s.contains("embeddings")) c.embeddings = path_of(s["embeddings"], base);
    if (s.contains("dimension")) c.embedding_dimension = s["dimension"].get<int>();
    if (s.contains("min_count")) c.embedding_min_count = s["min_count"].get<int>();
    if (s.contains("epochs")) c.embedding_epochs = s["epochs"].get<int>();
    if (s.contains("threshold")) c.segment_threshold = s["threshold"].get<double>();
    if (s.contains("min_size")) c.segment_min_size = s["min_size"].get<int>();
  }
}

}  // namespace

RunConfig parse_config(const std::string& text, const fs::path& base_dir) {
  RunConfig c;
  try {
    parse_into(c, json::parse(text), base_dir);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  c.landing_schedule.validate();
  c.fetch.validate();
  if (c.workers < 1) throw ConfigError("archive.workers must be >= 1");
  if (c.split_ratios.size() != 3) throw ConfigError("classifier.split needs three ratios");
  if (c.min_agree < 1) throw ConfigError("classifier.min_agree must be >= 1");
  return c;
}

RunConfig load_config(const fs::path& file) {
  std::string text;
  try {
    text = read_file(file);
  } catch (const Error& e) {
    throw ConfigError("cannot read config " + file.string());
  }
  return parse_config(text, file.parent_path());
}

std::string dump_config(const RunConfig& c) {
  ordered_json j;
  j["corpus_dir"] = c.corpus_dir.string();
  j["output_dir"] = c.output().string();
  j["site_list"] = c.site_list.string();
  j["archive"] = {{"base_url", c.archive_base_url},
                  {"timeout", c.fetch.timeout},
                  {"min_delay", c.fetch.min_delay_between_requests},
                  {"max_retries", c.fetch.max_retries},
                  {"backoff_base", c.fetch.backoff_base},
                  {"workers", c.workers},
                  {"schedule",
                   {{"yearly", {c.landing_schedule.yearly_range.first, c.landing_schedule.yearly_range.last}},
                    {"quarterly",
                     {c.landing_schedule.quarterly_range.first, c.landing_schedule.quarterly_range.last}},
                    {"monthly_start", c.landing_schedule.monthly_start.to_string()}}},
                  {"end", c.crawl_end.to_string()}};
  j["word_lists"] = {{"familiar", c.familiar_words.string()},
                     {"obfuscating", c.obfuscating_words.string()},
                     {"stop_words", c.stop_words.string()},
                     {"irregular_participles", c.irregular_participles.string()},
                     {"hyphenation", c.hyphenation.string()}};
  j["terms"] = c.terms.string();
  j["counting"] = {{"words", name_of(c.counting.word_strategy, kWords)},
                   {"sentences", name_of(c.counting.sentence_strategy, kSentences)},
                   {"syllables", name_of(c.counting.syllable_strategy, kSyllables)},
                   {"characters", name_of(c.counting.character_strategy, kCharacters)}};
  ordered_json models = ordered_json::array();
  for (const auto& m : c.gate_models) models.push_back({{"path", m.path.string()}, {"threshold", m.threshold}});
  j["gate"] = {{"min_words", c.gate_min_words},
               {"models", models},
               {"training_dir", c.gate_training_dir.string()}};
  j["classifier"] = {{"schema", c.schema.string()},
                     {"annotations", c.annotations_dir.string()},
                     {"bundle", c.bundle().string()},
                     {"split", c.split_ratios},
                     {"min_agree", c.min_agree},
                     {"min_precision", c.min_precision},
                     {"threshold", c.label_threshold}};
  j["segmenter"] = {{"embeddings", c.embeddings.string()},
                    {"dimension", c.embedding_dimension},
                    {"min_count", c.embedding_min_count},
                    {"epochs", c.embedding_epochs},
                    {"threshold", c.segment_threshold},
                    {"min_size", c.segment_min_size}};
  j["seed"] = c.seed;
  return j.dump(2) + "\n";
}

}  // namespace privlens::cli
