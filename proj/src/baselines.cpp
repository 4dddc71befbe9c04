#include "copycat/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>
#include <stdexcept>

#include "copycat/metrics.hpp"
#include "copycat/text.hpp"

namespace copycat {

namespace {

std::size_t argmax_lowest(const std::vector<double>& scores) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < scores.size(); ++i)
    if (scores[i] > scores[best]) best = i;
  return best;
}

std::string join(const std::vector<std::string>& parts) {
  std::string out;
  for (const auto& p : parts) {
    if (!out.empty()) out += ' ';
    out += p;
  }
  return out;
}

}  // namespace

std::size_t clustroid_index(const ReviewGroup& group) {
  const std::size_t n = group.size();
  if (n < 2) throw std::invalid_argument("clustroid: group needs at least two reviews");
  std::vector<double> scores(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i != j) scores[i] += rouge_l(group.reviews[i].tokens, group.reviews[j].tokens).f1;
    }
    scores[i] /= static_cast<double>(n - 1);
  }
  return argmax_lowest(scores);
}

const Review& clustroid(const ReviewGroup& group) { return group.reviews[clustroid_index(group)]; }

std::string lead(const ReviewGroup& group) {
  std::vector<std::string> firsts;
  for (const auto& r : group.reviews) {
    auto sentences = split_sentences(r.surface_text);
    if (sentences.empty()) throw std::invalid_argument("lead: review " + r.review_id + " has no sentence");
    firsts.push_back(std::move(sentences.front()));
  }
  return join(firsts);
}

std::size_t random_review_index(const ReviewGroup& group, std::uint64_t seed) {
  if (group.reviews.empty()) throw std::invalid_argument("random_review: empty group");
  std::mt19937_64 rng(seed);
  return std::uniform_int_distribution<std::size_t>(0, group.size() - 1)(rng);
}

const Review& random_review(const ReviewGroup& group, std::uint64_t seed) {
  return group.reviews[random_review_index(group, seed)];
}

std::size_t oracle_index(const ReviewGroup& group, std::span<const std::string> references) {
  if (references.empty()) throw std::invalid_argument("oracle: no references");
  if (group.reviews.empty()) throw std::invalid_argument("oracle: empty group");
  std::vector<std::vector<std::string>> refs;
  for (const auto& r : references) refs.push_back(tokenize(r));
  std::vector<double> scores;
  for (const auto& r : group.reviews) scores.push_back(mean_rouge_l_f1(r.tokens, refs));
  return argmax_lowest(scores);
}

const Review& oracle(const ReviewGroup& group, std::span<const std::string> references) {
  return group.reviews[oracle_index(group, references)];
}

std::vector<double> lexrank_centrality(const std::vector<std::vector<double>>& similarity, double damping,
                                       double tolerance) {
  const std::size_t s = similarity.size();
  if (s == 0) throw std::invalid_argument("lexrank_centrality: empty graph");
  if (!(damping > 0.0 && damping < 1.0)) throw std::invalid_argument("lexrank_centrality: damping outside (0, 1)");
  const double uniform = 1.0 / static_cast<double>(s);

  std::vector<std::vector<double>> transition(s, std::vector<double>(s, 0.0));
  bool any_edge = false;
  for (std::size_t i = 0; i < s; ++i) {
    if (similarity[i].size() != s) throw std::invalid_argument("lexrank_centrality: matrix is not square");
    double row = 0.0;
    for (std::size_t j = 0; j < s; ++j)
      if (j != i) row += similarity[i][j];
    if (row > 0.0) {
      any_edge = true;
      for (std::size_t j = 0; j < s; ++j)
        if (j != i) transition[i][j] = similarity[i][j] / row;
    } else {
      std::fill(transition[i].begin(), transition[i].end(), uniform);
    }
  }
  std::vector<double> p(s, uniform);
  if (!any_edge) return p;

  std::vector<double> next(s);
  for (int iter = 0; iter < 100000; ++iter) {
    std::fill(next.begin(), next.end(), (1.0 - damping) * uniform);
    for (std::size_t i = 0; i < s; ++i)
      for (std::size_t j = 0; j < s; ++j) next[j] += damping * p[i] * transition[i][j];
    double change = 0.0;
    for (std::size_t j = 0; j < s; ++j) change += std::abs(next[j] - p[j]);
    p.swap(next);
    if (change < tolerance) break;
  }
  return p;
}

SentenceGraph build_sentence_graph(std::vector<std::string> sentences, double damping) {
  SentenceGraph g;
  g.sentences = std::move(sentences);
  const std::size_t s = g.sentences.size();
  if (s == 0) throw std::invalid_argument("build_sentence_graph: no sentences");

  std::map<std::string, std::size_t> term_index;
  for (const auto& sent : g.sentences) {
    g.tokens.push_back(tokenize(sent));
    for (const auto& t : g.tokens.back()) term_index.emplace(t, term_index.size());
  }
  std::vector<std::size_t> df(term_index.size(), 0);
  std::vector<std::vector<double>> tf(s, std::vector<double>(term_index.size(), 0.0));
  for (std::size_t i = 0; i < s; ++i) {
    for (const auto& t : g.tokens[i]) tf[i][term_index.at(t)] += 1.0;
    for (std::size_t k = 0; k < df.size(); ++k)
      if (tf[i][k] > 0.0) ++df[k];
  }
  g.tfidf = tf;
  for (std::size_t i = 0; i < s; ++i)
    for (std::size_t k = 0; k < df.size(); ++k)
      if (df[k] > 0) g.tfidf[i][k] *= std::log(static_cast<double>(s) / static_cast<double>(df[k]));

  std::vector<double> norms(s, 0.0);
  for (std::size_t i = 0; i < s; ++i)
    norms[i] = std::sqrt(std::inner_product(g.tfidf[i].begin(), g.tfidf[i].end(), g.tfidf[i].begin(), 0.0));
  g.similarity.assign(s, std::vector<double>(s, 0.0));
  for (std::size_t i = 0; i < s; ++i) {
    for (std::size_t j = i + 1; j < s; ++j) {
      if (norms[i] == 0.0 || norms[j] == 0.0) continue;
      const double dot = std::inner_product(g.tfidf[i].begin(), g.tfidf[i].end(), g.tfidf[j].begin(), 0.0);
      const double sim = std::clamp(dot / (norms[i] * norms[j]), 0.0, 1.0);
      g.similarity[i][j] = g.similarity[j][i] = sim;
    }
  }
  g.centrality = lexrank_centrality(g.similarity, damping);
  return g;
}

std::string lexrank(const ReviewGroup& group, const LexRankOptions& options) {
  if (group.reviews.empty()) throw std::invalid_argument("lexrank: empty group");
  std::vector<std::string> sentences;
  std::size_t total_tokens = 0;
  for (const auto& r : group.reviews) {
    for (auto& s : split_sentences(r.surface_text)) sentences.push_back(std::move(s));
    total_tokens += r.tokens.size();
  }
  if (sentences.size() < 2) throw std::invalid_argument("lexrank: needs at least two sentences");
  const std::size_t budget = options.budget_tokens.value_or(
      static_cast<std::size_t>(std::llround(static_cast<double>(total_tokens) / static_cast<double>(group.size()))));

  SentenceGraph g = build_sentence_graph(std::move(sentences), options.damping);
  std::vector<std::size_t> order(g.sentences.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return g.centrality[a] > g.centrality[b]; });

  std::vector<std::size_t> chosen;
  std::size_t used = 0;
  for (std::size_t idx : order) {
    const std::size_t len = g.tokens[idx].size();
    if (used + len > budget) {
      if (chosen.empty()) chosen.push_back(idx);
      break;
    }
    chosen.push_back(idx);
    used += len;
  }
  std::sort(chosen.begin(), chosen.end());
  std::vector<std::string> picked;
  for (std::size_t idx : chosen) picked.push_back(g.sentences[idx]);
  return join(picked);
}

}  // namespace copycat
