#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace copycat {

struct RougeScore {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

// F1 from precision and recall; 0 when both are 0.
RougeScore make_rouge_score(double precision, double recall);

// Clipped n-gram overlap. Empty n-gram sets on either side give all zeros.
RougeScore rouge_n(std::span<const std::string> candidate, std::span<const std::string> reference, std::size_t n);

// Longest-common-subsequence based score.
RougeScore rouge_l(std::span<const std::string> candidate, std::span<const std::string> reference);
std::size_t lcs_length(std::span<const std::string> a, std::span<const std::string> b);

// Mean F1 over references; throws on an empty reference list.
double mean_rouge_n_f1(std::span<const std::string> candidate, std::span<const std::vector<std::string>> references,
                       std::size_t n);
double mean_rouge_l_f1(std::span<const std::string> candidate, std::span<const std::vector<std::string>> references);

// R1 / R2 / RL F1 of one candidate text against reference texts, each
// tokenized with the shared tokenizer (case-folded, no stemming).
struct RougeTriple {
  double r1 = 0.0;
  double r2 = 0.0;
  double rl = 0.0;
};
RougeTriple score_text(std::string_view candidate, std::span<const std::string> references);

// Averages over a system's (candidate, references) pairs; throws when the
// spans differ in length or are empty.
RougeTriple score_system(std::span<const std::string> candidates,
                         std::span<const std::vector<std::string>> references);

struct BwsJudgment {
  std::string item_id;
  std::vector<std::string> systems;
  std::string best;
  std::string worst;
};

// Per system: (times best - times worst) / times shown, in [-1, 1].
// Throws std::invalid_argument on empty input, best == worst, or a best or
// worst outside the listed systems.
std::map<std::string, double> bws_scores(std::span<const BwsJudgment> judgments);

enum class SupportLabel { Full, Partial, No };
SupportLabel parse_support_label(std::string_view name);

struct SupportPercentages {
  double full = 0.0;
  double partial = 0.0;
  double no = 0.0;
};

// Share of each label in percent; throws on empty input.
SupportPercentages content_support_aggregate(std::span<const SupportLabel> labels);

}  // namespace copycat
