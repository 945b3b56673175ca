#include "privlens/segmenter.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>

#include "privlens/tokenize.hpp"

namespace privlens {

namespace {

std::vector<double> mean_vector(const std::vector<std::string>& tokens, const EmbeddingTable& emb) {
  std::vector<double> m(static_cast<std::size_t>(std::max(emb.dimension(), 0)), 0.0);
  int known = 0;
  for (const auto& t : tokens) {
    const auto* v = emb.find(t);
    if (!v) continue;
    ++known;
    for (std::size_t d = 0; d < m.size(); ++d) m[d] += (*v)[d];
  }
  if (known == 0) return {};
  for (auto& x : m) x /= known;
  return m;
}

double cos_d(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.empty() || b.empty()) return 0.0;
  double dot = 0, na = 0, nb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0 || nb == 0) return 0.0;
  return std::clamp(dot / std::sqrt(na * nb), -1.0, 1.0);
}

class Bits {
 public:
  explicit Bits(std::size_t n = 0) : w_((n + 63) / 64, 0) {}
  void set(int i) { w_[i >> 6] |= std::uint64_t{1} << (i & 63); }
  void reset(int i) { w_[i >> 6] &= ~(std::uint64_t{1} << (i & 63)); }
  bool test(int i) const { return (w_[i >> 6] >> (i & 63)) & 1; }
  bool none() const {
    return std::all_of(w_.begin(), w_.end(), [](std::uint64_t x) { return x == 0; });
  }
  Bits operator&(const Bits& o) const {
    Bits r = *this;
    for (std::size_t i = 0; i < w_.size(); ++i) r.w_[i] &= o.w_[i];
    return r;
  }
  int count() const {
    int c = 0;
    for (auto x : w_) c += __builtin_popcountll(x);
    return c;
  }
  template <class F>
  void each(F&& f) const {
    for (std::size_t i = 0; i < w_.size(); ++i)
      for (std::uint64_t x = w_[i]; x; x &= x - 1) f(static_cast<int>(i * 64 + __builtin_ctzll(x)));
  }

 private:
  std::vector<std::uint64_t> w_;
};

void bron_kerbosch(std::vector<int>& r, Bits p, Bits x, const std::vector<Bits>& adj,
                   std::vector<std::vector<int>>& out) {
  if (p.none() && x.none()) {
    auto c = r;
    std::sort(c.begin(), c.end());
    out.push_back(std::move(c));
    return;
  }
  // Pivot: vertex of P u X with most neighbours in P.
  int pivot = -1, best = -1;
  auto consider = [&](int u) {
    int k = (p & adj[u]).count();
    if (k > best) {
      best = k;
      pivot = u;
    }
  };
  p.each(consider);
  x.each(consider);
  std::vector<int> candidates;
  p.each([&](int v) {
    if (!adj[pivot].test(v)) candidates.push_back(v);
  });
  for (int v : candidates) {
    r.push_back(v);
    bron_kerbosch(r, p & adj[v], x & adj[v], adj, out);
    r.pop_back();
    p.reset(v);
    x.set(v);
  }
}

}  // namespace

double sentence_relatedness(const std::vector<std::string>& a, const std::vector<std::string>& b,
                            const EmbeddingTable& emb) {
  return cos_d(mean_vector(a, emb), mean_vector(b, emb));
}

double sentence_relatedness(std::string_view a, std::string_view b, const EmbeddingTable& emb) {
  return sentence_relatedness(embedding_tokens(a), embedding_tokens(b), emb);
}

std::vector<std::vector<int>> maximal_cliques(const std::vector<std::vector<int>>& adjacency) {
  const int n = static_cast<int>(adjacency.size());
  std::vector<Bits> adj(n, Bits(n));
  for (int u = 0; u < n; ++u)
    for (int v : adjacency[u])
      if (v != u) {
        adj[u].set(v);
        adj[v].set(u);
      }
  // Degeneracy order: repeatedly remove a minimum-degree vertex.
  std::vector<int> degree(n), order;
  std::vector<bool> removed(n, false);
  for (int u = 0; u < n; ++u) degree[u] = adj[u].count();
  for (int k = 0; k < n; ++k) {
    int u = -1;
    for (int v = 0; v < n; ++v)
      if (!removed[v] && (u < 0 || degree[v] < degree[u])) u = v;
    removed[u] = true;
    order.push_back(u);
    adj[u].each([&](int v) {
      if (!removed[v]) --degree[v];
    });
  }
  std::vector<int> rank(n);
  for (int i = 0; i < n; ++i) rank[order[i]] = i;

  std::vector<std::vector<int>> out;
  std::vector<int> r;
  for (int v : order) {
    Bits p(n), x(n);
    adj[v].each([&](int w) {
      if (rank[w] > rank[v]) p.set(w);
      else x.set(w);
    });
    r.assign(1, v);
    bron_kerbosch(r, p, x, adj, out);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::pair<int, int>> clique_partition(int n, const std::vector<std::vector<int>>& cliques,
                                                  int min_size) {
  if (n <= 0) return {};
  // start[i]: first sentence of the run holding i. Runs stay contiguous, so
  // a merge only relabels the later run.
  std::vector<int> start(n);
  std::iota(start.begin(), start.end(), 0);
  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& c : cliques) {
      for (std::size_t k = 1; k < c.size(); ++k) {
        int a = c[k - 1], b = c[k];
        int ra = start[a], rb = start[b];
        if (ra == rb) continue;
        // Adjacent runs: the run of b begins right after the run of a ends.
        if (start[rb - 1] == ra) {
          for (int i = rb; i < n && start[i] == rb; ++i) start[i] = ra;
          changed = true;
        }
      }
    }
  }
  std::vector<std::pair<int, int>> runs;
  for (int i = 0; i < n; ++i) {
    if (i == 0 || start[i] != start[i - 1]) runs.push_back({i, i + 1});
    else runs.back().second = i + 1;
  }
  if (min_size > 1) {
    std::vector<std::pair<int, int>> merged;
    for (const auto& r : runs) {
      if (!merged.empty() && r.second - r.first < min_size) merged.back().second = r.second;
      else merged.push_back(r);
    }
    // A short first run has no predecessor: fold it into its successor.
    if (merged.size() > 1 && merged[0].second - merged[0].first < min_size) {
      merged[1].first = merged[0].first;
      merged.erase(merged.begin());
    }
    runs = std::move(merged);
  }
  return runs;
}

namespace {

// Splits at blank (whitespace-only) lines and records the index of each
// paragraph's first sentence.
std::vector<int> paragraph_starts_of(std::string_view text, std::vector<std::string>& sentences) {
  std::vector<int> starts;
  std::string para;
  auto flush = [&] {
    auto ss = split_sentences(para, SentenceStrategy::tokenizer);
    if (!ss.empty()) starts.push_back(static_cast<int>(sentences.size()));
    for (auto& x : ss) sentences.push_back(std::move(x));
    para.clear();
  };
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(pos, nl - pos);
    if (line.find_first_not_of(" \t\r\f") == std::string_view::npos) {
      flush();
    } else {
      para.append(line);
      para += '\n';
    }
    pos = nl + 1;
  }
  flush();
  return starts;
}

}  // namespace

std::vector<Segment> segment_sentence_list(const std::vector<std::string>& sentences,
                                           const EmbeddingTable& emb, double threshold,
                                           int min_size, std::string_view policy_ref,
                                           const std::vector<int>& paragraph_starts) {
  const int n = static_cast<int>(sentences.size());
  std::vector<Segment> out;
  if (n == 0) return out;

  // Chunks of at most kMaxSentencesPerCall sentences, cut at paragraph
  // starts where possible.
  std::vector<std::pair<int, int>> chunks;
  int begin = 0;
  while (begin < n) {
    int limit = std::min(n, begin + kMaxSentencesPerCall);
    int end = limit;
    if (limit < n) {
      for (auto it = paragraph_starts.rbegin(); it != paragraph_starts.rend(); ++it)
        if (*it > begin && *it <= limit) {
          end = *it;
          break;
        }
    }
    chunks.push_back({begin, end});
    begin = end;
  }

  std::vector<std::vector<double>> means(n);
  for (int i = 0; i < n; ++i) means[i] = mean_vector(embedding_tokens(sentences[i]), emb);

  std::vector<std::pair<int, int>> spans;
  for (auto [cb, ce] : chunks) {
    int m = ce - cb;
    std::vector<std::vector<int>> adj(m);
    for (int i = 0; i < m; ++i)
      for (int j = i + 1; j < m; ++j)
        if (cos_d(means[cb + i], means[cb + j]) >= threshold) {
          adj[i].push_back(j);
          adj[j].push_back(i);
        }
    for (auto [a, b] : clique_partition(m, maximal_cliques(adj), min_size))
      spans.push_back({cb + a, cb + b});
  }
  // A short run at the start of a later chunk folds into the previous chunk.
  if (min_size > 1) {
    std::vector<std::pair<int, int>> merged;
    for (const auto& s : spans) {
      if (!merged.empty() && s.second - s.first < min_size) merged.back().second = s.second;
      else merged.push_back(s);
    }
    spans = std::move(merged);
  }

  for (const auto& [a, b] : spans) {
    Segment s;
    s.policy_ref = std::string(policy_ref);
    s.index = static_cast<int>(out.size());
    s.sentence_begin = a;
    s.sentence_end = b;
    for (int i = a; i < b; ++i) {
      if (i > a) s.text += ' ';
      s.text += sentences[i];
    }
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<std::string> segment_sentences(std::string_view text) {
  std::vector<std::string> sentences;
  paragraph_starts_of(text, sentences);
  return sentences;
}

std::vector<Segment> segment(std::string_view policy_text, const EmbeddingTable& emb,
                             double threshold, int min_size, std::string_view policy_ref) {
  std::vector<std::string> sentences;
  auto starts = paragraph_starts_of(policy_text, sentences);
  return segment_sentence_list(sentences, emb, threshold, min_size, policy_ref, starts);
}

}  // namespace privlens
