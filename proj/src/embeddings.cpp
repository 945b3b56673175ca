#include "privlens/embeddings.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <random>
#include <sstream>

#include "privlens/corpus.hpp"
#include "privlens/error.hpp"
#include "privlens/tokenize.hpp"

namespace privlens {

EmbeddingTable::EmbeddingTable(int dimension) : dimension_(dimension) {
  if (dimension <= 0) throw DomainError("embedding dimension must be positive");
}

void EmbeddingTable::set(std::string token, std::vector<float> vector) {
  if (static_cast<int>(vector.size()) != dimension_)
    throw DomainError("embedding for '" + token + "' has " + std::to_string(vector.size()) +
                      " components, expected " + std::to_string(dimension_));
  vectors_[std::move(token)] = std::move(vector);
}

const std::vector<float>* EmbeddingTable::find(std::string_view token) const {
  auto it = vectors_.find(std::string(token));
  return it == vectors_.end() ? nullptr : &it->second;
}

std::vector<std::string> EmbeddingTable::tokens() const {
  std::vector<std::string> out;
  out.reserve(vectors_.size());
  for (const auto& [t, v] : vectors_) out.push_back(t);
  std::sort(out.begin(), out.end());
  return out;
}

void EmbeddingTable::save(const std::filesystem::path& path) const {
  std::string out = std::to_string(vectors_.size()) + " " + std::to_string(dimension_) + "\n";
  char buf[32];
  for (const auto& t : tokens()) {
    out += t;
    for (float x : vectors_.at(t)) {
      auto [p, ec] = std::to_chars(buf, buf + sizeof buf, x);
      out += ' ';
      out.append(buf, p);
    }
    out += '\n';
  }
  write_file_atomic(path, out);
}

EmbeddingTable EmbeddingTable::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open embeddings " + path.string());
  std::size_t n = 0;
  int dim = 0;
  std::string header;
  std::getline(in, header);
  std::istringstream hs(header);
  if (!(hs >> n >> dim) || dim <= 0) throw ConfigError(path.string() + ": bad header");
  EmbeddingTable t(dim);
  std::string line;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string token;
    ls >> token;
    std::vector<float> v;
    v.reserve(dim);
    float x;
    while (ls >> x) v.push_back(x);
    if (static_cast<int>(v.size()) != dim)
      throw ConfigError(path.string() + ":" + std::to_string(lineno) + ": expected " +
                        std::to_string(dim) + " components");
    t.set(std::move(token), std::move(v));
  }
  if (t.size() != n)
    throw ConfigError(path.string() + ": header says " + std::to_string(n) + " tokens, found " +
                      std::to_string(t.size()));
  return t;
}

std::vector<std::string> embedding_tokens(std::string_view text) {
  auto toks = word_tokens(text);
  for (auto& t : toks) t = to_lower(t);
  return toks;
}

double cosine(const std::vector<float>& a, const std::vector<float>& b) {
  double dot = 0, na = 0, nb = 0;
  for (std::size_t i = 0; i < a.size() && i < b.size(); ++i) {
    dot += static_cast<double>(a[i]) * b[i];
    na += static_cast<double>(a[i]) * a[i];
    nb += static_cast<double>(b[i]) * b[i];
  }
  if (na == 0 || nb == 0) return 0.0;
  return std::clamp(dot / std::sqrt(na * nb), -1.0, 1.0);
}

EmbeddingTable train_embeddings(const std::vector<std::string>& corpus,
                                const EmbeddingOptions& o) {
  if (o.dimension <= 0 || o.window <= 0 || o.epochs <= 0 || o.negative < 0 || o.min_count < 1)
    throw ConfigError("embedding options out of range");

  std::vector<std::vector<std::string>> docs;
  std::map<std::string, long> counts;  // ordered: vocabulary ids are deterministic
  for (const auto& text : corpus) {
    docs.push_back(embedding_tokens(text));
    for (const auto& t : docs.back()) ++counts[t];
  }
  std::unordered_map<std::string, int> id;
  std::vector<std::string> vocab;
  std::vector<long> freq;
  for (const auto& [t, c] : counts)
    if (c >= o.min_count) {
      id.emplace(t, static_cast<int>(vocab.size()));
      vocab.push_back(t);
      freq.push_back(c);
    }
  if (vocab.empty()) throw DomainError("no token occurs at least min_count times");

  std::vector<std::vector<int>> seqs;
  for (const auto& d : docs) {
    std::vector<int> s;
    for (const auto& t : d)
      if (auto it = id.find(t); it != id.end()) s.push_back(it->second);
    if (!s.empty()) seqs.push_back(std::move(s));
  }

  const int V = static_cast<int>(vocab.size());
  const int D = o.dimension;
  std::mt19937_64 rng(o.seed);
  std::uniform_real_distribution<float> init(-0.5f / D, 0.5f / D);
  std::vector<float> in(static_cast<std::size_t>(V) * D), out(static_cast<std::size_t>(V) * D, 0.0f);
  for (auto& x : in) x = init(rng);

  // Unigram^0.75 table for negatives.
  std::vector<double> weights(V);
  for (int i = 0; i < V; ++i) weights[i] = std::pow(static_cast<double>(freq[i]), 0.75);
  std::discrete_distribution<int> noise(weights.begin(), weights.end());

  long total_steps = 0;
  for (const auto& s : seqs) total_steps += static_cast<long>(s.size());
  total_steps *= o.epochs;
  long step = 0;
  std::vector<float> grad(D);
  std::uniform_int_distribution<int> shrink(0, o.window - 1);

  for (int epoch = 0; epoch < o.epochs; ++epoch) {
    for (const auto& s : seqs) {
      const int n = static_cast<int>(s.size());
      for (int pos = 0; pos < n; ++pos, ++step) {
        double lr = o.learning_rate * std::max(1e-4, 1.0 - static_cast<double>(step) / total_steps);
        int b = shrink(rng);
        for (int c = std::max(0, pos - o.window + b); c <= std::min(n - 1, pos + o.window - b); ++c) {
          if (c == pos) continue;
          float* v = &in[static_cast<std::size_t>(s[c]) * D];
          std::fill(grad.begin(), grad.end(), 0.0f);
          for (int k = 0; k <= o.negative; ++k) {
            int target;
            float label;
            if (k == 0) {
              target = s[pos];
              label = 1.0f;
            } else {
              target = noise(rng);
              if (target == s[pos]) continue;
              label = 0.0f;
            }
            float* u = &out[static_cast<std::size_t>(target) * D];
            double f = 0;
            for (int d = 0; d < D; ++d) f += static_cast<double>(v[d]) * u[d];
            double sig = f > 30 ? 1.0 : f < -30 ? 0.0 : 1.0 / (1.0 + std::exp(-f));
            float g = static_cast<float>((label - sig) * lr);
            for (int d = 0; d < D; ++d) {
              grad[d] += g * u[d];
              u[d] += g * v[d];
            }
          }
          for (int d = 0; d < D; ++d) v[d] += grad[d];
        }
      }
    }
  }

  EmbeddingTable table(D);
  for (int i = 0; i < V; ++i)
    table.set(vocab[i], std::vector<float>(in.begin() + static_cast<long>(i) * D,
                                           in.begin() + static_cast<long>(i + 1) * D));
  return table;
}

}  // namespace privlens
