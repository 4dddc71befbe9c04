#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "copycat/corpus.hpp"
#include "copycat/encoder.hpp"
#include "copycat/model.hpp"

namespace copycat {

inline constexpr double kLogFloor = 1e-12;

// Encoder states the decoder attends to and copies from.
struct CopySource {
  nd::Var states;  // [P x H]
  nd::Var keys;    // [P x A], attention.key applied to every state
  std::vector<TokenId> ids;
  // (review index, position) of every source row.
  std::vector<std::pair<std::size_t, std::size_t>> origin;

  std::size_t positions() const { return ids.size(); }
};

// Per-review attention keys; compute once per group and reuse.
std::vector<nd::Var> attention_keys(const Weights& w, std::span<const EncodedReview> reviews);

// Source made of every review except `exclude` (pass nullopt to keep all).
CopySource make_copy_source(std::span<const EncodedReview> reviews, std::span<const nd::Var> keys,
                            std::optional<std::size_t> exclude);

struct DecoderState {
  nd::Var hidden;   // s_t
  nd::Var context;  // ctx_t, zero before the first step
  nd::Var code;     // z (or c when z is ablated)
};

struct Attention {
  nd::Var context;  // [H]
  nd::Var weights;  // [P]
};

// s_0 = tanh(W code + b), ctx_0 = 0.
DecoderState initial_state(const Weights& w, nd::Var code);

// v^T tanh(Ws s + Wh h_j + b) per source position, softmax, weighted sum.
Attention attend(const Weights& w, nd::Var query, const CopySource& source);

// s_t = GRU(s_{t-1}, [w_t, ctx_{t-1}, z]), then ctx_t = attend(s_t). Without
// attention the context stays zero.
std::pair<DecoderState, std::optional<Attention>> decode_step(const Weights& w, const DecoderState& state,
                                                              nd::Var input_embedding,
                                                              const CopySource* source);

// sigmoid(ffnn_tanh([s_t, ctx_t, w_t]))
nd::Var copy_gate(const Weights& w, nd::Var hidden, nd::Var context, nd::Var input_embedding);

struct OutputDistribution {
  nd::Var p_vocab;       // [V]
  nd::Var p_copy;        // [V + n_oov], invalid without attention
  nd::Var distribution;  // [V + n_oov]
};

// p_gen * P_vocab + (1 - p_gen) * P_copy over the extended vocabulary.
// P_vocab = softmax(out_w [s, ctx] + out_b); P_copy(w) sums the attention
// of every source position holding w.
OutputDistribution output_distribution(const Weights& w, nd::Var hidden, nd::Var context,
                                       nd::Var attention_weights, nd::Var p_gen,
                                       std::span<const TokenId> source_ids, std::size_t extended_size);

struct StepResult {
  DecoderState state;
  nd::Var attention;  // invalid without attention
  nd::Var p_gen;      // constant 1 without attention
  OutputDistribution output;
};

// One full decoder step: state update, gate, and output distribution. The
// input token is a fixed-vocabulary id (copied OOVs are fed back as UNK).
StepResult decoder_step(const Weights& w, const DecoderState& state, TokenId input_token,
                        const CopySource* source, std::size_t extended_size);

// Plain-value snapshot of one step, for inspection and tests.
struct ExtendedDistribution {
  std::vector<double> probabilities;
  std::vector<double> p_vocab;
  std::vector<double> p_copy;
  std::vector<double> attention;
  double p_gen = 1.0;
};
ExtendedDistribution snapshot(const StepResult& step);

// Teacher-forced log p(r | code, source): inputs BOS, r_1..r_T; targets
// r_1..r_T, EOS indexed by extended id. Probabilities below 1e-12 are
// floored and counted on the tape.
nd::Var review_log_likelihood(const Weights& w, nd::Var code, std::span<const TokenId> token_ids,
                              std::span<const TokenId> extended_ids, const CopySource* source,
                              std::size_t extended_size);

}  // namespace copycat
