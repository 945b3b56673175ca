#include "privlens/linear_model.hpp"

#include <algorithm>
#include <cmath>
#include <json.hpp>
#include <map>

#include "privlens/corpus.hpp"
#include "privlens/embeddings.hpp"
#include "privlens/error.hpp"

namespace privlens {

using nlohmann::json;

namespace {

double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  double e = std::exp(z);
  return e / (1.0 + e);
}

}  // namespace

std::vector<std::string> TfidfVectorizer::ngrams(std::string_view text) {
  auto toks = embedding_tokens(text);
  std::vector<std::string> out = toks;
  for (std::size_t i = 1; i < toks.size(); ++i) out.push_back(toks[i - 1] + " " + toks[i]);
  return out;
}

void TfidfVectorizer::fit(const std::vector<std::string>& texts, int min_df) {
  std::map<std::string, int> df;  // ordered: feature indices are deterministic
  for (const auto& t : texts) {
    auto g = ngrams(t);
    std::sort(g.begin(), g.end());
    g.erase(std::unique(g.begin(), g.end()), g.end());
    for (auto& x : g) ++df[x];
  }
  vocab_.clear();
  idf_.clear();
  const double n = static_cast<double>(texts.size());
  for (const auto& [term, d] : df) {
    if (d < min_df) continue;
    vocab_.emplace(term, static_cast<int>(idf_.size()));
    idf_.push_back(std::log((1.0 + n) / (1.0 + d)) + 1.0);
  }
}

SparseVector TfidfVectorizer::transform(std::string_view text) const {
  std::map<int, double> tf;
  for (const auto& g : ngrams(text))
    if (auto it = vocab_.find(g); it != vocab_.end()) tf[it->second] += 1.0;
  SparseVector v;
  double norm = 0;
  for (auto [i, c] : tf) {
    double x = c * idf_[i];
    v.emplace_back(i, x);
    norm += x * x;
  }
  if (norm > 0) {
    norm = std::sqrt(norm);
    for (auto& [i, x] : v) x /= norm;
  }
  return v;
}

std::vector<std::string> TfidfVectorizer::terms() const {
  std::vector<std::string> out(idf_.size());
  for (const auto& [t, i] : vocab_) out[i] = t;
  return out;
}

void TfidfVectorizer::restore(const std::vector<std::string>& terms, std::vector<double> idf) {
  if (terms.size() != idf.size()) throw SchemaError("vectorizer: terms and idf differ in length");
  vocab_.clear();
  for (std::size_t i = 0; i < terms.size(); ++i) vocab_.emplace(terms[i], static_cast<int>(i));
  idf_ = std::move(idf);
}

void LinearBackend::fit(const std::vector<std::string>& texts, const LabelMatrix& y) {
  if (texts.empty() || texts.size() != y.size())
    throw DomainError("fit: need one label row per text and at least one text");
  const std::size_t labels = y[0].size();
  for (const auto& row : y)
    if (row.size() != labels) throw DomainError("fit: ragged label matrix");

  vectorizer_.fit(texts, options_.min_df);
  std::vector<SparseVector> X;
  X.reserve(texts.size());
  for (const auto& t : texts) X.push_back(vectorizer_.transform(t));
  const std::size_t d = vectorizer_.vocabulary_size();
  const double n = static_cast<double>(texts.size());

  weights_.assign(labels, std::vector<double>(d, 0.0));
  bias_.assign(labels, 0.0);
  for (std::size_t l = 0; l < labels; ++l) {
    double pos = 0;
    for (const auto& row : y) pos += row[l];
    if (pos == 0 || pos == n) {
      // Nothing to separate: constant smoothed prior.
      double p = (pos + 0.5) / (n + 1.0);
      bias_[l] = std::log(p / (1.0 - p));
      weights_[l].clear();
      continue;
    }
    double w_pos = 1.0, w_neg = 1.0;
    if (options_.balanced) {
      w_pos = n / (2.0 * pos);
      w_neg = n / (2.0 * (n - pos));
    }
    // Rows have unit norm plus the bias feature, so the mean weighted
    // log-loss gradient is Lipschitz with constant <= max_w * 2 / 4.
    const double lipschitz = std::max(w_pos, w_neg) * 0.5 + options_.l2;
    const double step = 1.0 / lipschitz;
    auto& w = weights_[l];
    double& b = bias_[l];
    b = std::log(pos / (n - pos));
    std::vector<double> grad(d);
    for (int it = 0; it < options_.iterations; ++it) {
      std::fill(grad.begin(), grad.end(), 0.0);
      double gb = 0;
      for (std::size_t i = 0; i < X.size(); ++i) {
        double z = b;
        for (auto [j, x] : X[i]) z += w[j] * x;
        const double target = y[i][l];
        const double weight = target ? w_pos : w_neg;
        const double r = weight * (sigmoid(z) - target) / n;
        for (auto [j, x] : X[i]) grad[j] += r * x;
        gb += r;
      }
      for (std::size_t j = 0; j < d; ++j) w[j] -= step * (grad[j] + options_.l2 * w[j]);
      b -= step * gb;
    }
  }
}

std::vector<double> LinearBackend::predict_proba(std::string_view text) const {
  if (bias_.empty()) throw DomainError("predict_proba: model is not trained");
  SparseVector x = vectorizer_.transform(text);
  std::vector<double> out(bias_.size());
  for (std::size_t l = 0; l < bias_.size(); ++l) {
    double z = bias_[l];
    if (!weights_[l].empty())
      for (auto [j, v] : x) z += weights_[l][j] * v;
    out[l] = sigmoid(z);
  }
  return out;
}

void LinearBackend::save(const std::filesystem::path& file) const {
  json j;
  j["kind"] = kind();
  j["options"] = {{"l2", options_.l2},
                  {"iterations", options_.iterations},
                  {"balanced", options_.balanced},
                  {"min_df", options_.min_df}};
  j["terms"] = vectorizer_.terms();
  j["idf"] = vectorizer_.idf();
  j["bias"] = bias_;
  j["weights"] = weights_;  // empty row for a constant label
  write_file_atomic(file, j.dump());
}

std::unique_ptr<LinearBackend> LinearBackend::load(const std::filesystem::path& file) {
  try {
    json j = json::parse(read_file(file));
    if (j.at("kind") != "tfidf-logistic") throw SchemaError(file.string() + ": not a linear model");
    LogisticOptions o;
    const auto& oj = j.at("options");
    o.l2 = oj.at("l2").get<double>();
    o.iterations = oj.at("iterations").get<int>();
    o.balanced = oj.at("balanced").get<bool>();
    o.min_df = oj.at("min_df").get<int>();
    auto m = std::make_unique<LinearBackend>(o);
    m->vectorizer_.restore(j.at("terms").get<std::vector<std::string>>(),
                           j.at("idf").get<std::vector<double>>());
    m->bias_ = j.at("bias").get<std::vector<double>>();
    m->weights_ = j.at("weights").get<std::vector<std::vector<double>>>();
    if (m->weights_.size() != m->bias_.size()) throw SchemaError(file.string() + ": shape mismatch");
    for (const auto& w : m->weights_)
      if (!w.empty() && w.size() != m->vectorizer_.vocabulary_size())
        throw SchemaError(file.string() + ": weight row size mismatch");
    return m;
  } catch (const json::exception& e) {
    throw SchemaError(file.string() + ": " + e.what());
  }
}

BackendFactory LinearBackend::factory(LogisticOptions options) {
  return [options] { return std::make_unique<LinearBackend>(options); };
}

std::unique_ptr<ClassifierBackend> load_backend(const std::filesystem::path& file) {
  json j;
  try {
    j = json::parse(read_file(file));
  } catch (const json::exception& e) {
    throw SchemaError(file.string() + ": " + e.what());
  }
  std::string kind = j.value("kind", "");
  if (kind == "tfidf-logistic") return LinearBackend::load(file);
  throw SchemaError(file.string() + ": unknown backend kind '" + kind + "'");
}

}  // namespace privlens
