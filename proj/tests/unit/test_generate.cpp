#include <gtest/gtest.h>

#include <vector>

#include "copycat/generate.hpp"
#include "copycat/synthetic.hpp"
#include "copycat/text.hpp"

namespace copycat {
namespace {

class GenerateTest : public ::testing::Test {
 protected:
  GenerateTest() : setup(make_tiny_setup()), model(setup.config) { model.initialize(31); }

  SummaryResult run(GenerationMode mode, std::uint64_t seed = 0, std::size_t max_len = 12) {
    SummarizeOptions o;
    o.mode = mode;
    o.seed = seed;
    o.max_len = max_len;
    return summarize(model, setup.vocab, setup.group, o);
  }

  TinySetup setup;
  Model model;
};

TEST_F(GenerateTest, MeanModeIsDeterministic) {
  const SummaryResult a = run(GenerationMode::Mean), b = run(GenerationMode::Mean);
  EXPECT_EQ(a.ids, b.ids);
  EXPECT_EQ(a.log_prob, b.log_prob);
  EXPECT_EQ(a.mode, GenerationMode::Mean);
}

TEST_F(GenerateTest, SampleModeIsReproducibleForASeed) {
  const SummaryResult a = run(GenerationMode::Sample, 5), b = run(GenerationMode::Sample, 5);
  EXPECT_EQ(a.ids, b.ids);
  EXPECT_EQ(a.log_prob, b.log_prob);
}

TEST_F(GenerateTest, ResultFieldsAreConsistent) {
  const SummaryResult r = run(GenerationMode::Mean, 0, 6);
  EXPECT_EQ(r.group_id, "tiny");
  EXPECT_EQ(r.tokens.size(), r.ids.size());
  EXPECT_LE(r.ids.size(), 6u);
  EXPECT_EQ(r.text, detokenize(r.tokens));
  for (TokenId id : r.ids) EXPECT_NE(id, kEos);
  if (!r.finished) EXPECT_EQ(r.ids.size(), 6u);
  EXPECT_LE(r.log_prob, 0.0);
}

TEST_F(GenerateTest, ClosedGateCopiesEveryTokenFromTheSource) {
  model.params().value("gate.output_bias")[0] = -60.0;
  const SummaryResult r = run(GenerationMode::Mean, 0, 5);
  ASSERT_FALSE(r.ids.empty());
  ASSERT_EQ(r.copied.size(), r.ids.size());
  for (const CopiedToken& c : r.copied) {
    EXPECT_EQ(r.tokens[c.output_position], c.token);
    EXPECT_EQ(setup.group.reviews.at(c.review).tokens.at(c.position), c.token);
  }
}

TEST_F(GenerateTest, ProvenanceOfOutOfVocabularyTokensPointsAtTheEntity) {
  // The entity occurs once in the group, so its provenance is fixed.
  model.params().value("gate.output_bias")[0] = -60.0;
  const SummaryResult r = run(GenerationMode::Mean, 0, 4);
  for (std::size_t t = 0; t < r.ids.size(); ++t) {
    if (r.ids[t] < setup.vocab.size()) continue;
    bool found = false;
    for (const CopiedToken& c : r.copied)
      if (c.output_position == t) {
        found = true;
        EXPECT_EQ(c.token, "zoomtron");
        EXPECT_EQ(c.review, 1u);
        EXPECT_EQ(c.position, 3u);
      }
    EXPECT_TRUE(found);
  }
}

TEST(GenerateNoAttention, NeverEmitsExtendedIds) {
  const TinySetup s = make_tiny_setup(Ablation::NoAttention);
  Model m(s.config);
  m.initialize(2);
  for (GenerationMode mode : {GenerationMode::Mean, GenerationMode::Sample}) {
    SummarizeOptions o;
    o.mode = mode;
    o.seed = 3;
    o.max_len = 8;
    const SummaryResult r = summarize(m, s.vocab, s.group, o);
    for (TokenId id : r.ids) EXPECT_LT(id, s.vocab.size());
    EXPECT_TRUE(r.copied.empty());
  }
}

TEST(GenerateVariants, EveryAblationDecodes) {
  for (Ablation a : {Ablation::NoC, Ablation::NoZ}) {
    const TinySetup s = make_tiny_setup(a);
    Model m(s.config);
    m.initialize(2);
    SummarizeOptions o;
    o.max_len = 5;
    const SummaryResult x = summarize(m, s.vocab, s.group, o);
    const SummaryResult y = summarize(m, s.vocab, s.group, o);
    EXPECT_EQ(x.ids, y.ids) << to_string(a);
  }
}

TEST(Generate, RejectsMismatchedInputs) {
  const TinySetup s = make_tiny_setup();
  Model m(s.config);
  m.initialize(1);
  ReviewGroup empty;
  EXPECT_THROW(summarize(m, s.vocab, empty, {}), std::invalid_argument);
  EXPECT_THROW(summarize(m, Vocabulary(), s.group, {}), std::invalid_argument);
}

SummaryResult with_copies(std::vector<std::string> tokens) {
  SummaryResult r;
  for (std::size_t i = 0; i < tokens.size(); ++i) r.copied.push_back({i, tokens[i], 0, 0, 0});
  return r;
}

TEST(CopyStatistics, AveragesCopiesPerSummary) {
  const std::vector<SummaryResult> rs = {with_copies({"bistro", "zoomtron"}),
                                         with_copies({"zoomtron", "ann", "zoomtron", "bistro"})};
  const CopyStatistics s = copy_statistics(rs);
  EXPECT_DOUBLE_EQ(s.mean_copied_per_summary, 3.0);
  using Row = std::pair<std::string, std::size_t>;
  EXPECT_EQ(s.frequency, (std::vector<Row>{{"zoomtron", 3}, {"bistro", 2}, {"ann", 1}}));
}

TEST(CopyStatistics, NoCopiesGiveZeroMeanAndEmptyTable) {
  const std::vector<SummaryResult> rs = {with_copies({}), with_copies({})};
  const CopyStatistics s = copy_statistics(rs);
  EXPECT_EQ(s.mean_copied_per_summary, 0.0);
  EXPECT_TRUE(s.frequency.empty());
  EXPECT_THROW(copy_statistics(std::vector<SummaryResult>{}), std::invalid_argument);
}

}  // namespace
}  // namespace copycat
