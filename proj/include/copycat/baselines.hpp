#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "copycat/corpus.hpp"

namespace copycat {

// Review with the highest mean ROUGE-L F1 against the other reviews of its
// group; the lowest index wins ties. Throws for groups of fewer than two.
std::size_t clustroid_index(const ReviewGroup& group);
const Review& clustroid(const ReviewGroup& group);

// First sentence of every review, joined with single spaces in group order.
std::string lead(const ReviewGroup& group);

// Uniform seeded pick.
std::size_t random_review_index(const ReviewGroup& group, std::uint64_t seed);
const Review& random_review(const ReviewGroup& group, std::uint64_t seed);

// Review with the highest mean ROUGE-L F1 against the references; lowest
// index wins ties. Throws when there are no references.
std::size_t oracle_index(const ReviewGroup& group, std::span<const std::string> references);
const Review& oracle(const ReviewGroup& group, std::span<const std::string> references);

struct SentenceGraph {
  std::vector<std::string> sentences;
  std::vector<std::vector<std::string>> tokens;
  // tf * ln(S / df) over the term index of the graph.
  std::vector<std::vector<double>> tfidf;
  // Cosine similarity, symmetric, zero diagonal, entries in [0, 1].
  std::vector<std::vector<double>> similarity;
  std::vector<double> centrality;  // probability vector
};

// Stationary distribution of the damped random walk over the row-normalized
// similarity matrix: p = (1 - d) / S + d * M^T p, iterated until the L1
// change drops below tolerance. Rows without edges jump uniformly; a graph
// without any edge yields uniform centrality.
std::vector<double> lexrank_centrality(const std::vector<std::vector<double>>& similarity, double damping,
                                       double tolerance = 1e-10);

SentenceGraph build_sentence_graph(std::vector<std::string> sentences, double damping = 0.85);

struct LexRankOptions {
  double damping = 0.85;
  // Defaults to the group's mean review length in tokens.
  std::optional<std::size_t> budget_tokens;
};

// Picks sentences of the whole group by descending centrality (earlier
// sentence first on ties) until the next one would exceed the budget,
// always emitting at least one, and returns them in document order.
std::string lexrank(const ReviewGroup& group, const LexRankOptions& options = {});

}  // namespace copycat
