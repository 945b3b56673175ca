#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace privlens {

using LabelMatrix = std::vector<std::vector<std::uint8_t>>;  // rows: samples

// Multi-label probabilistic classifier over raw text.
class ClassifierBackend {
 public:
  virtual ~ClassifierBackend() = default;
  virtual std::string kind() const = 0;
  // y[i].size() is the label count and equal for all rows.
  virtual void fit(const std::vector<std::string>& texts, const LabelMatrix& y) = 0;
  virtual std::vector<double> predict_proba(std::string_view text) const = 0;
  virtual std::size_t label_count() const = 0;
  virtual void save(const std::filesystem::path& file) const = 0;
};

using BackendFactory = std::function<std::unique_ptr<ClassifierBackend>()>;

using SparseVector = std::vector<std::pair<int, double>>;  // sorted by index

// Unigram + bigram counts over lowercased word tokens, smoothed idf
// (ln((1+n)/(1+df)) + 1), rows scaled to unit length.
class TfidfVectorizer {
 public:
  void fit(const std::vector<std::string>& texts, int min_df = 1);
  SparseVector transform(std::string_view text) const;
  std::size_t vocabulary_size() const { return idf_.size(); }

  std::vector<std::string> terms() const;  // by feature index
  const std::vector<double>& idf() const { return idf_; }
  void restore(const std::vector<std::string>& terms, std::vector<double> idf);

  static std::vector<std::string> ngrams(std::string_view text);

 private:
  std::unordered_map<std::string, int> vocab_;
  std::vector<double> idf_;
};

struct LogisticOptions {
  double l2 = 1e-4;     // penalty weight on the mean log-loss
  int iterations = 400;
  bool balanced = false;  // reweight classes to equal total weight
  int min_df = 1;
};

// One binary logistic regression per label, fitted by full-batch gradient
// descent with a step size from the loss's Lipschitz bound, so training is
// deterministic. Labels with a single class in training predict that
// class's smoothed frequency.
class LinearBackend : public ClassifierBackend {
 public:
  explicit LinearBackend(LogisticOptions options = {}) : options_(options) {}

  std::string kind() const override { return "tfidf-logistic"; }
  void fit(const std::vector<std::string>& texts, const LabelMatrix& y) override;
  std::vector<double> predict_proba(std::string_view text) const override;
  std::size_t label_count() const override { return weights_.size(); }
  void save(const std::filesystem::path& file) const override;

  static std::unique_ptr<LinearBackend> load(const std::filesystem::path& file);
  static BackendFactory factory(LogisticOptions options = {});

 private:
  LogisticOptions options_;
  TfidfVectorizer vectorizer_;
  std::vector<std::vector<double>> weights_;  // per label, per feature
  std::vector<double> bias_;
};

// Reads any backend written by save(), dispatching on its "kind".
std::unique_ptr<ClassifierBackend> load_backend(const std::filesystem::path& file);

}  // namespace privlens
