#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "privlens/embeddings.hpp"

namespace privlens {

struct Segment {
  std::string policy_ref;
  int index = 0;
  int sentence_begin = 0;  // [begin, end)
  int sentence_end = 0;
  std::string text;
};

// Cosine of the mean vectors of the known tokens; 0 if either side has none.
double sentence_relatedness(std::string_view a, std::string_view b, const EmbeddingTable& emb);
double sentence_relatedness(const std::vector<std::string>& a_tokens,
                            const std::vector<std::string>& b_tokens, const EmbeddingTable& emb);

// Maximal cliques of an undirected graph given as adjacency lists, via
// Bron-Kerbosch with pivoting over a degeneracy ordering. Each clique is
// sorted; isolated vertices come out as singletons.
std::vector<std::vector<int>> maximal_cliques(const std::vector<std::vector<int>>& adjacency);

// Partition of [0, n) into contiguous runs. Adjacent runs are merged while
// some clique has members in both; then runs shorter than min_size are folded
// into their predecessor (the successor for the first run).
std::vector<std::pair<int, int>> clique_partition(int n, const std::vector<std::vector<int>>& cliques,
                                                  int min_size);

// Sentences in the order segment() numbers them: the canonical sentence
// split, paragraph by paragraph (blank lines separate paragraphs).
std::vector<std::string> segment_sentences(std::string_view text);

inline constexpr int kMaxSentencesPerCall = 2000;

std::vector<Segment> segment_sentence_list(const std::vector<std::string>& sentences,
                                           const EmbeddingTable& emb, double threshold = 0.25,
                                           int min_size = 1, std::string_view policy_ref = {},
                                           const std::vector<int>& paragraph_starts = {});

std::vector<Segment> segment(std::string_view policy_text, const EmbeddingTable& emb,
                             double threshold = 0.25, int min_size = 1,
                             std::string_view policy_ref = {});

}  // namespace privlens
