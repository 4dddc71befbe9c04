#include "copycat/metrics.hpp"

#include <algorithm>
#include <stdexcept>

#include "copycat/text.hpp"

namespace copycat {

namespace {

using Ngram = std::vector<std::string>;

std::map<Ngram, std::size_t> count_ngrams(std::span<const std::string> tokens, std::size_t n) {
  std::map<Ngram, std::size_t> counts;
  if (tokens.size() < n) return counts;
  for (std::size_t i = 0; i + n <= tokens.size(); ++i) ++counts[Ngram(tokens.begin() + i, tokens.begin() + i + n)];
  return counts;
}

}  // namespace

RougeScore make_rouge_score(double precision, double recall) {
  RougeScore s{precision, recall, 0.0};
  if (precision + recall > 0.0) s.f1 = 2.0 * precision * recall / (precision + recall);
  return s;
}

RougeScore rouge_n(std::span<const std::string> candidate, std::span<const std::string> reference, std::size_t n) {
  if (n == 0) throw std::invalid_argument("rouge_n: n must be at least 1");
  if (candidate.size() < n || reference.size() < n) return {};
  const auto cand = count_ngrams(candidate, n);
  const auto ref = count_ngrams(reference, n);
  std::size_t overlap = 0;
  for (const auto& [gram, count] : cand) {
    if (auto it = ref.find(gram); it != ref.end()) overlap += std::min(count, it->second);
  }
  const double cand_total = static_cast<double>(candidate.size() - n + 1);
  const double ref_total = static_cast<double>(reference.size() - n + 1);
  return make_rouge_score(static_cast<double>(overlap) / cand_total, static_cast<double>(overlap) / ref_total);
}

std::size_t lcs_length(std::span<const std::string> a, std::span<const std::string> b) {
  std::vector<std::size_t> prev(b.size() + 1, 0), cur(b.size() + 1, 0);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j)
      cur[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], cur[j - 1]);
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

RougeScore rouge_l(std::span<const std::string> candidate, std::span<const std::string> reference) {
  if (candidate.empty() || reference.empty()) return {};
  const auto l = static_cast<double>(lcs_length(candidate, reference));
  return make_rouge_score(l / static_cast<double>(candidate.size()), l / static_cast<double>(reference.size()));
}

double mean_rouge_n_f1(std::span<const std::string> candidate, std::span<const std::vector<std::string>> references,
                       std::size_t n) {
  if (references.empty()) throw std::invalid_argument("mean_rouge_n_f1: no references");
  double total = 0.0;
  for (const auto& r : references) total += rouge_n(candidate, r, n).f1;
  return total / static_cast<double>(references.size());
}

double mean_rouge_l_f1(std::span<const std::string> candidate, std::span<const std::vector<std::string>> references) {
  if (references.empty()) throw std::invalid_argument("mean_rouge_l_f1: no references");
  double total = 0.0;
  for (const auto& r : references) total += rouge_l(candidate, r).f1;
  return total / static_cast<double>(references.size());
}

RougeTriple score_text(std::string_view candidate, std::span<const std::string> references) {
  const auto cand = tokenize(candidate);
  std::vector<std::vector<std::string>> refs;
  refs.reserve(references.size());
  for (const auto& r : references) refs.push_back(tokenize(r));
  return {mean_rouge_n_f1(cand, refs, 1), mean_rouge_n_f1(cand, refs, 2), mean_rouge_l_f1(cand, refs)};
}

RougeTriple score_system(std::span<const std::string> candidates,
                         std::span<const std::vector<std::string>> references) {
  if (candidates.empty() || candidates.size() != references.size())
    throw std::invalid_argument("score_system: candidates and references must pair up");
  RougeTriple mean;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const RougeTriple s = score_text(candidates[i], references[i]);
    mean.r1 += s.r1;
    mean.r2 += s.r2;
    mean.rl += s.rl;
  }
  const auto n = static_cast<double>(candidates.size());
  mean.r1 /= n;
  mean.r2 /= n;
  mean.rl /= n;
  return mean;
}

std::map<std::string, double> bws_scores(std::span<const BwsJudgment> judgments) {
  if (judgments.empty()) throw std::invalid_argument("bws_scores: no judgments");
  struct Tally {
    long best = 0, worst = 0, shown = 0;
  };
  std::map<std::string, Tally> tally;
  for (const auto& j : judgments) {
    if (j.best == j.worst) throw std::invalid_argument("bws_scores: best equals worst in item " + j.item_id);
    auto listed = [&](const std::string& s) { return std::find(j.systems.begin(), j.systems.end(), s) != j.systems.end(); };
    if (!listed(j.best) || !listed(j.worst))
      throw std::invalid_argument("bws_scores: best/worst not among the systems of item " + j.item_id);
    std::vector<std::string> unique(j.systems);
    std::sort(unique.begin(), unique.end());
    unique.erase(std::unique(unique.begin(), unique.end()), unique.end());
    for (const auto& s : unique) ++tally[s].shown;
    ++tally[j.best].best;
    ++tally[j.worst].worst;
  }
  std::map<std::string, double> scores;
  for (const auto& [system, t] : tally)
    scores[system] = static_cast<double>(t.best - t.worst) / static_cast<double>(t.shown);
  return scores;
}

SupportLabel parse_support_label(std::string_view name) {
  if (name == "full") return SupportLabel::Full;
  if (name == "partial") return SupportLabel::Partial;
  if (name == "no") return SupportLabel::No;
  throw std::invalid_argument("unknown support label: " + std::string(name));
}

SupportPercentages content_support_aggregate(std::span<const SupportLabel> labels) {
  if (labels.empty()) throw std::invalid_argument("content_support_aggregate: no labels");
  std::size_t full = 0, partial = 0, no = 0;
  for (SupportLabel l : labels) {
    switch (l) {
      case SupportLabel::Full: ++full; break;
      case SupportLabel::Partial: ++partial; break;
      case SupportLabel::No: ++no; break;
    }
  }
  const auto n = static_cast<double>(labels.size());
  return {100.0 * static_cast<double>(full) / n, 100.0 * static_cast<double>(partial) / n,
          100.0 * static_cast<double>(no) / n};
}

}  // namespace copycat
