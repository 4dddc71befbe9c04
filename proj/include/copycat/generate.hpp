#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "copycat/corpus.hpp"
#include "copycat/model.hpp"
#include "copycat/objective.hpp"

namespace copycat {

struct SummarizeOptions {
  GenerationMode mode = GenerationMode::Mean;
  std::uint64_t seed = 0;  // only read in Sample mode
  std::size_t beam_width = 5;
  std::size_t max_len = 80;
};

// A summary token that the copy path, not the generator, put there.
struct CopiedToken {
  std::size_t output_position = 0;
  std::string token;
  TokenId id = 0;  // extended id
  // Source location with the highest attention among positions holding id.
  std::size_t review = 0;
  std::size_t position = 0;
};

struct SummaryResult {
  std::string group_id;
  std::string text;
  std::vector<std::string> tokens;  // EOS excluded
  std::vector<TokenId> ids;         // extended ids, EOS excluded
  std::vector<CopiedToken> copied;
  GenerationMode mode = GenerationMode::Mean;
  double log_prob = 0.0;
  bool finished = false;  // false when max_len cut the summary off
};

// Decodes a summary for a whole group. Mean mode uses c = E[q(c | group)]
// and z = E[p(z | c)] and is deterministic; Sample mode draws both from a
// generator seeded by options.seed. Every review is a copy source.
SummaryResult summarize(Model& model, const Vocabulary& vocab, ReviewGroup group, const SummarizeOptions& options);

struct CopyStatistics {
  double mean_copied_per_summary = 0.0;
  // Surface form and count, most frequent first, ties alphabetical.
  std::vector<std::pair<std::string, std::size_t>> frequency;
};

// Throws std::invalid_argument on an empty input.
CopyStatistics copy_statistics(std::span<const SummaryResult> summaries);

}  // namespace copycat
