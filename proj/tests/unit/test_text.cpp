#include <gtest/gtest.h>

#include <random>
#include <string>
#include <vector>

#include "copycat/text.hpp"

namespace copycat {
namespace {

using Tokens = std::vector<std::string>;

TEST(Tokenize, EmptyInputGivesNoTokens) { EXPECT_TRUE(tokenize("").empty()); }

TEST(Tokenize, LowercasesAndSplitsTrailingPunctuation) {
  EXPECT_EQ(tokenize("Great price!"), (Tokens{"great", "price", "!"}));
}

TEST(Tokenize, SplitsCliticButKeepsInnerHyphen) {
  EXPECT_EQ(tokenize("it's 5-star"), (Tokens{"it", "'s", "5-star"}));
}

TEST(Tokenize, LeadingPunctuationIsSeparate) {
  EXPECT_EQ(tokenize("(really) good."), (Tokens{"(", "really", ")", "good", "."}));
}

TEST(Tokenize, CollapsesWhitespace) { EXPECT_EQ(tokenize("  a \t b\n"), (Tokens{"a", "b"})); }

TEST(Detokenize, AttachesClosingPunctuationAndClitics) {
  EXPECT_EQ(detokenize({"it", "'s", "great", ",", "really", "!"}), "it's great, really!");
  EXPECT_EQ(detokenize({"(", "yes", ")"}), "(yes)");
  EXPECT_EQ(detokenize({}), "");
}

TEST(Normalize, IsIdempotent) {
  for (const char* s : {"Great price!", "it's 5-star", "We LOVED it , really .", "(ok) fine?!"}) {
    const std::string once = normalize(s);
    EXPECT_EQ(normalize(once), once) << s;
  }
}

TEST(Normalize, RoundTripIsIdentityOnNormalizedText) {
  std::mt19937_64 rng(5);
  const std::vector<std::string> pieces = {"the", "Food", "wasn't", "5-star", ",", "great", "!", "(really)",
                                           "it's", "e.g.", "ok.", "?", "don't", "price"};
  std::uniform_int_distribution<std::size_t> pick(0, pieces.size() - 1);
  std::uniform_int_distribution<std::size_t> len(0, 12);
  for (int trial = 0; trial < 500; ++trial) {
    std::string text;
    for (std::size_t k = len(rng); k > 0; --k) text += pieces[pick(rng)] + " ";
    const std::string norm = normalize(text);
    EXPECT_EQ(detokenize(tokenize(norm)), norm) << text;
    EXPECT_EQ(tokenize(norm), tokenize(text)) << text;
  }
}

TEST(SplitSentences, SplitsOnTerminalPunctuationRuns) {
  EXPECT_EQ(split_sentences("Good food. Slow service!! Worth it? Yes"),
            (Tokens{"Good food.", "Slow service!!", "Worth it?", "Yes"}));
}

TEST(SplitSentences, KeepsInnerDotsAndDropsEmptyPieces) {
  EXPECT_EQ(split_sentences("Version 2.5 works.   "), (Tokens{"Version 2.5 works."}));
  EXPECT_TRUE(split_sentences("   ").empty());
  EXPECT_TRUE(split_sentences("").empty());
}

}  // namespace
}  // namespace copycat
