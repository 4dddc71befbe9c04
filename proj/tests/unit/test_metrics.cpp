#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "copycat/metrics.hpp"
#include "copycat/text.hpp"

namespace copycat {
namespace {

using Tokens = std::vector<std::string>;

Tokens split(const std::string& s) { return tokenize(s); }

void expect_score(const RougeScore& s, double p, double r, double f) {
  EXPECT_NEAR(s.precision, p, 1e-15);
  EXPECT_NEAR(s.recall, r, 1e-15);
  EXPECT_NEAR(s.f1, f, 1e-15);
}

// ---- ROUGE-N ----

TEST(RougeN, SelfMatchIsPerfect) {
  const Tokens x = split("the cat sat on the mat");
  expect_score(rouge_n(x, x, 1), 1, 1, 1);
  expect_score(rouge_n(x, x, 2), 1, 1, 1);
}

TEST(RougeN, HandCountedUnigrams) {
  expect_score(rouge_n(split("the cat sat"), split("the cat ran"), 1), 2.0 / 3, 2.0 / 3, 2.0 / 3);
  expect_score(rouge_n(split("the cat sat"), split("the cat ran"), 2), 0.5, 0.5, 0.5);
}

TEST(RougeN, OverlapIsClipped) { expect_score(rouge_n(split("a a a"), split("a"), 1), 1.0 / 3, 1.0, 0.5); }

TEST(RougeN, DegenerateInputsGiveZeros) {
  expect_score(rouge_n(split(""), split("a b"), 1), 0, 0, 0);
  expect_score(rouge_n(split("a"), split("a"), 2), 0, 0, 0);
  expect_score(rouge_n(split("a b"), split("c d"), 1), 0, 0, 0);
  EXPECT_THROW(rouge_n(split("a"), split("a"), 0), std::invalid_argument);
}

// ---- ROUGE-L ----

TEST(RougeL, SelfMatchIsPerfect) { expect_score(rouge_l(split("a b c"), split("a b c")), 1, 1, 1); }

TEST(RougeL, HandLcs) {
  EXPECT_EQ(lcs_length(split("a b c d"), split("a c b d")), 3u);
  expect_score(rouge_l(split("a b c d"), split("a c b d")), 0.75, 0.75, 0.75);
  expect_score(rouge_l(split("a b"), split("c d")), 0, 0, 0);
  expect_score(rouge_l(split("a b"), split("x a y b z")), 1.0, 0.4, 2 * 0.4 / 1.4);
}

// Random token lists over a small alphabet.
Tokens random_tokens(std::mt19937_64& rng, std::size_t min_len = 1) {
  std::uniform_int_distribution<std::size_t> len(min_len, 10), sym(0, 4);
  Tokens t(len(rng));
  for (auto& s : t) s = std::string(1, static_cast<char>('a' + sym(rng)));
  return t;
}

std::size_t brute_force_lcs(const Tokens& a, const Tokens& b) {
  // Longest subsequence of a (by subset enumeration) that is a subsequence of b.
  std::size_t best = 0;
  for (std::uint32_t mask = 0; mask < (1u << a.size()); ++mask) {
    std::size_t j = 0, taken = 0;
    bool ok = true;
    for (std::size_t i = 0; i < a.size() && ok; ++i) {
      if (!(mask & (1u << i))) continue;
      while (j < b.size() && b[j] != a[i]) ++j;
      if (j == b.size()) ok = false;
      else {
        ++j;
        ++taken;
      }
    }
    if (ok) best = std::max(best, taken);
  }
  return best;
}

TEST(RougeProperties, SelfScoreIsOneOnRandomLists) {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 1000; ++trial) {
    const Tokens x = random_tokens(rng);
    EXPECT_DOUBLE_EQ(rouge_l(x, x).f1, 1.0);
  }
}

TEST(RougeProperties, LcsMatchesSubsetEnumeration) {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 300; ++trial) {
    const Tokens a = random_tokens(rng), b = random_tokens(rng);
    EXPECT_EQ(lcs_length(a, b), brute_force_lcs(a, b));
  }
}

TEST(RougeProperties, NgramF1IsSymmetricAndBounded) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 500; ++trial) {
    const Tokens a = random_tokens(rng), b = random_tokens(rng);
    for (std::size_t n : {1u, 2u}) {
      const RougeScore ab = rouge_n(a, b, n), ba = rouge_n(b, a, n);
      EXPECT_DOUBLE_EQ(ab.precision, ba.recall);
      EXPECT_DOUBLE_EQ(ab.recall, ba.precision);
      EXPECT_DOUBLE_EQ(ab.f1, ba.f1);
      EXPECT_GE(ab.f1, 0.0);
      EXPECT_LE(ab.f1, 1.0);
    }
    const RougeScore l = rouge_l(a, b);
    EXPECT_LE(l.f1, 1.0);
    EXPECT_EQ(l.f1 == 0.0, lcs_length(a, b) == 0);
  }
}

TEST(RougeAggregation, MeanOverReferencesAndSystems) {
  const std::vector<Tokens> refs = {split("the cat sat"), split("a dog ran")};
  EXPECT_NEAR(mean_rouge_n_f1(split("the cat ran"), refs, 1), (2.0 / 3 + 1.0 / 3) / 2, 1e-15);
  EXPECT_THROW(mean_rouge_l_f1(split("x"), std::vector<Tokens>{}), std::invalid_argument);

  const std::vector<std::string> texts = {"The cat sat.", "A dog!"};
  const std::vector<std::vector<std::string>> text_refs = {{"the cat sat ."}, {"a dog ran"}};
  const RougeTriple t = score_system(texts, text_refs);
  EXPECT_NEAR(t.r1, (1.0 + 2 * (2.0 / 3) * (2.0 / 3) / (4.0 / 3)) / 2, 1e-15);
  EXPECT_THROW(score_system(texts, std::vector<std::vector<std::string>>{{"x"}}), std::invalid_argument);
}

// ---- best-worst scaling ----

TEST(Bws, HandCountedScores) {
  std::vector<BwsJudgment> js;
  for (int i = 0; i < 10; ++i) {
    const std::string best = i < 3 ? "ours" : "b";
    const std::string worst = i == 3 ? "ours" : (i < 3 ? "b" : "c");
    js.push_back({"item" + std::to_string(i), {"ours", "b", "c", "d"}, best, worst});
  }
  const auto s = bws_scores(js);
  EXPECT_DOUBLE_EQ(s.at("ours"), 0.2);
  EXPECT_DOUBLE_EQ(s.at("d"), 0.0);
}

TEST(Bws, Extremes) {
  const std::vector<BwsJudgment> js = {{"1", {"x", "y"}, "x", "y"}, {"2", {"x", "y", "z"}, "x", "y"}};
  const auto s = bws_scores(js);
  EXPECT_EQ(s.at("x"), 1.0);
  EXPECT_EQ(s.at("y"), -1.0);
  EXPECT_EQ(s.at("z"), 0.0);
}

TEST(Bws, RejectsMalformedJudgments) {
  EXPECT_THROW(bws_scores(std::vector<BwsJudgment>{}), std::invalid_argument);
  EXPECT_THROW(bws_scores(std::vector<BwsJudgment>{{"1", {"x", "y"}, "x", "x"}}), std::invalid_argument);
  EXPECT_THROW(bws_scores(std::vector<BwsJudgment>{{"1", {"x", "y"}, "q", "y"}}), std::invalid_argument);
}

TEST(BwsProperties, ScoresBoundedAndCountsBalance) {
  std::mt19937_64 rng(4);
  const std::vector<std::string> systems = {"a", "b", "c", "d"};
  std::uniform_int_distribution<std::size_t> pick(0, 3);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<BwsJudgment> js;
    std::map<std::string, int> net;
    for (int k = 0; k < 12; ++k) {
      const std::size_t b = pick(rng);
      std::size_t w = pick(rng);
      while (w == b) w = pick(rng);
      js.push_back({std::to_string(k), systems, systems[b], systems[w]});
      ++net[systems[b]];
      --net[systems[w]];
    }
    const auto s = bws_scores(js);
    double weighted = 0.0;
    for (const auto& [name, score] : s) {
      EXPECT_GE(score, -1.0);
      EXPECT_LE(score, 1.0);
      EXPECT_NEAR(score * 12, net[name], 1e-12);
      weighted += score * 12;
    }
    EXPECT_NEAR(weighted, 0.0, 1e-12);
  }
}

// ---- content support ----

std::vector<SupportLabel> labels(std::size_t full, std::size_t partial, std::size_t no) {
  std::vector<SupportLabel> out(full, SupportLabel::Full);
  out.insert(out.end(), partial, SupportLabel::Partial);
  out.insert(out.end(), no, SupportLabel::No);
  return out;
}

TEST(ContentSupport, HandCountedPercentages) {
  const auto all = content_support_aggregate(labels(5, 0, 0));
  EXPECT_EQ(all.full, 100.0);
  EXPECT_EQ(all.partial, 0.0);
  EXPECT_EQ(all.no, 0.0);
  const auto mixed = content_support_aggregate(labels(2, 1, 1));
  EXPECT_EQ(mixed.full, 50.0);
  EXPECT_EQ(mixed.partial, 25.0);
  EXPECT_EQ(mixed.no, 25.0);
  EXPECT_THROW(content_support_aggregate(std::vector<SupportLabel>{}), std::invalid_argument);
}

TEST(ContentSupport, ReproducesPublishedTableLayout) {
  // 437 / 319 / 226 of 982 labels is the smallest fixture that rounds to
  // the published 44.50 / 32.48 / 23.01.
  const auto s = content_support_aggregate(labels(437, 319, 226));
  EXPECT_EQ(std::round(s.full * 100) / 100, 44.50);
  EXPECT_EQ(std::round(s.partial * 100) / 100, 32.48);
  EXPECT_EQ(std::round(s.no * 100) / 100, 23.01);
  EXPECT_NEAR(s.full + s.partial + s.no, 100.0, 1e-12);
}

TEST(ContentSupport, ParsesLabelNames) {
  EXPECT_EQ(parse_support_label("full"), SupportLabel::Full);
  EXPECT_EQ(parse_support_label("partial"), SupportLabel::Partial);
  EXPECT_EQ(parse_support_label("no"), SupportLabel::No);
  EXPECT_THROW(parse_support_label("maybe"), std::invalid_argument);
}

}  // namespace
}  // namespace copycat
