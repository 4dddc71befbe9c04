#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <utility>
#include <vector>

#include "copycat/corpus.hpp"

namespace copycat {

struct BeamHypothesis {
  std::vector<TokenId> tokens;  // emitted tokens, EOS included when finished
  double log_prob = 0.0;
  bool finished = false;

  // Length-normalized score; the length counts the EOS.
  double normalized_score() const {
    return tokens.empty() ? 0.0 : log_prob / static_cast<double>(tokens.size());
  }
};

template <typename State>
struct BeamStep {
  State state;
  std::vector<double> log_probs;  // over the extended vocabulary
};

namespace detail {

inline bool lexicographically_less(const std::vector<TokenId>& a, TokenId a_last, const std::vector<TokenId>& b,
                                   TokenId b_last) {
  const std::size_t n = std::min(a.size(), b.size());
  for (std::size_t i = 0; i < n; ++i)
    if (a[i] != b[i]) return a[i] < b[i];
  if (a.size() != b.size()) {
    // One prefix is shorter; compare its appended token against the other's
    // next element.
    if (a.size() < b.size()) return a_last != b[a.size()] ? a_last < b[a.size()] : true;
    return b_last != a[b.size()] ? a[b.size()] < b_last : false;
  }
  return a_last < b_last;
}

// Higher score first; equal scores fall back to the lexicographically smaller
// token sequence.
inline bool better(double score_a, const std::vector<TokenId>& a, double score_b, const std::vector<TokenId>& b) {
  if (score_a != score_b) return score_a > score_b;
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

}  // namespace detail

// Beam search over a step function `step(const State&, TokenId input) ->
// BeamStep<State>`, starting from `bos`. Each round keeps the `width` best
// expansions by cumulative log-probability; expansions ending in `eos` are
// set aside as finished. Returns the finished hypothesis with the best
// log_prob / length, or the best unfinished one when nothing finished
// within max_len tokens. Ties go to the lexicographically smaller sequence.
template <typename State, typename StepFn>
BeamHypothesis beam_search(StepFn&& step, State initial, std::size_t width, std::size_t max_len, TokenId bos,
                           TokenId eos) {
  if (width == 0 || max_len == 0) throw std::invalid_argument("beam_search: width and max_len must be positive");

  struct Live {
    BeamHypothesis hyp;
    State state;
  };
  struct Candidate {
    std::size_t parent;
    TokenId token;
    double log_prob;
  };

  std::vector<Live> beam;
  beam.push_back(Live{BeamHypothesis{}, std::move(initial)});
  std::vector<BeamHypothesis> finished;

  for (std::size_t len = 1; len <= max_len && !beam.empty(); ++len) {
    std::vector<BeamStep<State>> expanded;
    expanded.reserve(beam.size());
    std::vector<Candidate> candidates;
    for (std::size_t k = 0; k < beam.size(); ++k) {
      const TokenId input = beam[k].hyp.tokens.empty() ? bos : beam[k].hyp.tokens.back();
      expanded.push_back(step(beam[k].state, input));
      const auto& lp = expanded.back().log_probs;
      for (TokenId t = 0; t < lp.size(); ++t) {
        if (!std::isfinite(lp[t])) continue;
        candidates.push_back({k, t, beam[k].hyp.log_prob + lp[t]});
      }
    }
    auto order = [&](const Candidate& a, const Candidate& b) {
      if (a.log_prob != b.log_prob) return a.log_prob > b.log_prob;
      return detail::lexicographically_less(beam[a.parent].hyp.tokens, a.token, beam[b.parent].hyp.tokens,
                                            b.token);
    };
    const std::size_t keep = std::min(width, candidates.size());
    std::partial_sort(candidates.begin(), candidates.begin() + static_cast<long>(keep), candidates.end(), order);

    std::vector<Live> next;
    for (std::size_t i = 0; i < keep; ++i) {
      const Candidate& c = candidates[i];
      BeamHypothesis h = beam[c.parent].hyp;
      h.tokens.push_back(c.token);
      h.log_prob = c.log_prob;
      if (c.token == eos) {
        h.finished = true;
        finished.push_back(std::move(h));
      } else {
        next.push_back(Live{std::move(h), expanded[c.parent].state});
      }
    }
    beam = std::move(next);
  }

  const std::vector<BeamHypothesis>* pool = &finished;
  std::vector<BeamHypothesis> unfinished;
  if (finished.empty()) {
    for (auto& l : beam) unfinished.push_back(std::move(l.hyp));
    pool = &unfinished;
  }
  if (pool->empty()) throw std::runtime_error("beam_search: no hypothesis survived");
  const BeamHypothesis* best = &pool->front();
  for (const auto& h : *pool) {
    if (detail::better(h.normalized_score(), h.tokens, best->normalized_score(), best->tokens)) best = &h;
  }
  return *best;
}

}  // namespace copycat
