#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "copycat/corpus.hpp"
#include "copycat/model.hpp"

namespace copycat {

// Encoder output for one review, restricted to its unpadded positions.
struct EncodedReview {
  nd::Var embeddings;   // [T x E]
  nd::Var hidden;       // [T x H]
  nd::Var states;       // m_t = [h_t, w_t], [T x (H + E)]
  nd::Var final_state;  // h_T, [H]
  std::size_t length = 0;
  // Extended ids of the unpadded positions, used as copy targets.
  std::vector<TokenId> extended_ids;
};

// Embedding rows for fixed-vocabulary ids; PAD maps to a constant zero row.
nd::Var embed_token(const Weights& w, TokenId id);
nd::Var embed(const Weights& w, std::span<const TokenId> ids);

// Unidirectional GRU from h_0 = 0. Positions with padding[t] == true keep
// the previous state and are left out of the returned sequences.
EncodedReview encode_review(const Weights& w, std::span<const TokenId> ids,
                            std::span<const TokenId> extended_ids, const std::vector<bool>* padding = nullptr);
EncodedReview encode_review(const Weights& w, const Review& review);

}  // namespace copycat
