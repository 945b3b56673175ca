#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace privlens {

class EmbeddingTable {
 public:
  EmbeddingTable() = default;
  explicit EmbeddingTable(int dimension);

  int dimension() const { return dimension_; }
  std::size_t size() const { return vectors_.size(); }
  bool empty() const { return vectors_.empty(); }

  // Throws DomainError on a length mismatch.
  void set(std::string token, std::vector<float> vector);
  // nullptr when absent.
  const std::vector<float>* find(std::string_view token) const;

  // Tokens in lexicographic order, for deterministic iteration.
  std::vector<std::string> tokens() const;

  // Text format: "<vocab_size> <dimension>" then "<token> v1 ... vd" per line.
  void save(const std::filesystem::path& path) const;
  static EmbeddingTable load(const std::filesystem::path& path);

 private:
  int dimension_ = 0;
  std::unordered_map<std::string, std::vector<float>> vectors_;
};

// Lowercased word tokens, the unit the embeddings are keyed on.
std::vector<std::string> embedding_tokens(std::string_view text);

struct EmbeddingOptions {
  int dimension = 300;
  int min_count = 5;
  int window = 5;
  int negative = 5;
  int epochs = 5;
  double learning_rate = 0.025;
  std::uint64_t seed = 1;
};

// Skip-gram with negative sampling, single-threaded so a fixed seed gives
// identical tables. Throws DomainError when no token reaches min_count.
EmbeddingTable train_embeddings(const std::vector<std::string>& corpus,
                                const EmbeddingOptions& options = {});

double cosine(const std::vector<float>& a, const std::vector<float>& b);

}  // namespace privlens
