#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "privlens/error.hpp"
#include "privlens/extraction.hpp"
#include "privlens/segmenter.hpp"
#include "privlens/stats.hpp"
#include "privlens/term_tracker.hpp"
#include "privlens/text_metrics.hpp"

namespace py = pybind11;
using namespace privlens;

PYBIND11_MODULE(_core, m) {
  m.doc() = "privlens core bindings";

  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
  py::register_exception<DomainError>(m, "DomainError", base.ptr());
  py::register_exception<UndefinedInputError>(m, "UndefinedInputError", base.ptr());

  py::enum_<WordStrategy>(m, "WordStrategy")
      .value("whitespace_split", WordStrategy::whitespace_split)
      .value("tokenizer", WordStrategy::tokenizer);
  py::enum_<SentenceStrategy>(m, "SentenceStrategy")
      .value("tokenizer", SentenceStrategy::tokenizer)
      .value("regex", SentenceStrategy::regex);
  py::enum_<SyllableStrategy>(m, "SyllableStrategy")
      .value("vowel_groups", SyllableStrategy::vowel_groups)
      .value("hyphenation_dict", SyllableStrategy::hyphenation_dict);
  py::enum_<CharacterStrategy>(m, "CharacterStrategy")
      .value("per_word_no_punct_no_digits", CharacterStrategy::per_word_no_punct_no_digits)
      .value("full_text_no_punct_no_space", CharacterStrategy::full_text_no_punct_no_space);

  py::class_<HyphenationDict, std::shared_ptr<HyphenationDict>>(m, "HyphenationDict")
      .def(py::init<>())
      .def_static("load", [](const std::filesystem::path& p) {
        return std::make_shared<HyphenationDict>(HyphenationDict::load(p));
      })
      .def("add", &HyphenationDict::add);

  py::class_<CountingConfig>(m, "CountingConfig")
      .def(py::init<>())
      .def_readwrite("word_strategy", &CountingConfig::word_strategy)
      .def_readwrite("sentence_strategy", &CountingConfig::sentence_strategy)
      .def_readwrite("syllable_strategy", &CountingConfig::syllable_strategy)
      .def_readwrite("character_strategy", &CountingConfig::character_strategy)
      .def_property(
          "hyphenation", [](const CountingConfig& c) { return c.hyphenation; },
          [](CountingConfig& c, std::shared_ptr<HyphenationDict> d) { c.hyphenation = std::move(d); });

  py::class_<TextCounts>(m, "TextCounts")
      .def(py::init<>())
      .def_readwrite("words", &TextCounts::words)
      .def_readwrite("sentences", &TextCounts::sentences)
      .def_readwrite("syllables", &TextCounts::syllables)
      .def_readwrite("characters", &TextCounts::characters)
      .def_readwrite("polysyllables", &TextCounts::polysyllables)
      .def_readwrite("difficult_words", &TextCounts::difficult_words)
      .def_readwrite("complex_words", &TextCounts::complex_words)
      .def("__repr__", [](const TextCounts& c) {
        return "TextCounts(words=" + std::to_string(c.words) + ", sentences=" + std::to_string(c.sentences) +
               ", syllables=" + std::to_string(c.syllables) + ")";
      });

  py::class_<ReadabilityScores>(m, "ReadabilityScores")
      .def_readonly("fre", &ReadabilityScores::fre)
      .def_readonly("fkg", &ReadabilityScores::fkg)
      .def_readonly("ari", &ReadabilityScores::ari)
      .def_readonly("cl", &ReadabilityScores::cl)
      .def_readonly("smog", &ReadabilityScores::smog)
      .def_readonly("smog_valid", &ReadabilityScores::smog_valid)
      .def_readonly("dc", &ReadabilityScores::dc)
      .def_readonly("gf", &ReadabilityScores::gf);

  m.def("count", [](std::string_view text, const CountingConfig& c) { return count(text, c); },
        py::arg("text"), py::arg("config") = CountingConfig{});
  m.def(
      "readability",
      [](const TextCounts& c, bool force_smog, bool dale_chall) {
        return readability(c, {.force_smog = force_smog, .dale_chall = dale_chall});
      },
      py::arg("counts"), py::arg("force_smog") = false, py::arg("dale_chall") = false);
  m.def("vowel_group_syllables", &vowel_group_syllables);
  m.def("split_sentences", &split_sentences, py::arg("text"),
        py::arg("strategy") = SentenceStrategy::tokenizer);
  m.def("passive_fraction", [](std::string_view text) { return passive_fraction(text).passive_sentence_fraction; });
  m.def("time_to_read", &time_to_read);
  m.def("spearman", [](const std::vector<double>& a, const std::vector<double>& b) {
    return spearman_rank_corr(a, b);
  });

  py::class_<PoissonBinomial>(m, "PoissonBinomial")
      .def(py::init<std::vector<double>>())
      .def_property_readonly("pmf", &PoissonBinomial::pmf)
      .def("mean", &PoissonBinomial::mean)
      .def("cdf", &PoissonBinomial::cdf)
      .def(
          "interval",
          [](const PoissonBinomial& d, double low, double high) {
            auto iv = prediction_interval(d, low, high);
            return std::make_pair(iv.low, iv.high);
          },
          py::arg("low") = 0.025, py::arg("high") = 0.975);

  py::class_<CohortComparison>(m, "CohortComparison")
      .def_readonly("t", &CohortComparison::t)
      .def_readonly("df", &CohortComparison::df)
      .def_readonly("p_value", &CohortComparison::p_value)
      .def_readonly("cohens_d", &CohortComparison::cohens_d);
  m.def("welch", [](const std::vector<double>& a, const std::vector<double>& b) { return welch(a, b); });
  m.def("pearson", [](const std::vector<double>& a, const std::vector<double>& b) { return pearson(a, b); });

  m.def("mentions", [](std::string_view text, const std::string& term) {
    for (const auto& t : default_terms())
      if (t.canonical_name == term) return mentions(text, t);
    throw ConfigError("unknown term: " + term);
  });
  m.def("default_terms", [] {
    std::vector<std::string> names;
    for (const auto& t : default_terms()) names.push_back(t.canonical_name);
    return names;
  });

  py::class_<GateVerdict>(m, "GateVerdict")
      .def_readonly("language", &GateVerdict::language)
      .def_readonly("word_count", &GateVerdict::word_count)
      .def_readonly("policy_probabilities", &GateVerdict::policy_probabilities)
      .def_readonly("passed", &GateVerdict::passed);
  m.def(
      "gate",
      [](std::string_view text, const std::vector<std::pair<std::function<double(std::string)>, double>>& cs,
         std::size_t min_words) {
        std::vector<PolicyClassifier> classifiers;
        for (const auto& [f, t] : cs)
          classifiers.push_back({[f](std::string_view s) {
                                   py::gil_scoped_acquire gil;
                                   return f(std::string(s));
                                 },
                                 t});
        return gate(text, classifiers, min_words);
      },
      py::arg("text"), py::arg("classifiers") = std::vector<std::pair<std::function<double(std::string)>, double>>{},
      py::arg("min_words") = kMinPolicyWords);

  py::class_<EmbeddingTable>(m, "EmbeddingTable")
      .def(py::init<int>())
      .def("set", &EmbeddingTable::set)
      .def_static("load", &EmbeddingTable::load)
      .def("__len__", &EmbeddingTable::size);
  py::class_<Segment>(m, "Segment")
      .def_readonly("index", &Segment::index)
      .def_readonly("sentence_begin", &Segment::sentence_begin)
      .def_readonly("sentence_end", &Segment::sentence_end)
      .def_readonly("text", &Segment::text);
  m.def(
      "segment",
      [](std::string_view text, const EmbeddingTable& emb, double threshold, int min_size) {
        return segment(text, emb, threshold, min_size);
      },
      py::arg("text"), py::arg("embeddings"), py::arg("threshold") = 0.25, py::arg("min_size") = 1);
}
