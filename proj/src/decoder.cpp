#include "copycat/decoder.hpp"

#include <stdexcept>

namespace copycat {

std::vector<nd::Var> attention_keys(const Weights& w, std::span<const EncodedReview> reviews) {
  std::vector<nd::Var> keys;
  if (!w.att_key_w.valid()) return keys;
  keys.reserve(reviews.size());
  for (const auto& r : reviews) keys.push_back(nd::matmul_nt(r.hidden, w.att_key_w));
  return keys;
}

CopySource make_copy_source(std::span<const EncodedReview> reviews, std::span<const nd::Var> keys,
                            std::optional<std::size_t> exclude) {
  if (keys.size() != reviews.size()) throw std::invalid_argument("make_copy_source: key count mismatch");
  CopySource src;
  std::vector<nd::Var> states, key_blocks;
  for (std::size_t i = 0; i < reviews.size(); ++i) {
    if (exclude && *exclude == i) continue;
    states.push_back(reviews[i].hidden);
    key_blocks.push_back(keys[i]);
    for (std::size_t t = 0; t < reviews[i].length; ++t) {
      src.ids.push_back(reviews[i].extended_ids[t]);
      src.origin.emplace_back(i, t);
    }
  }
  if (states.empty()) throw std::invalid_argument("make_copy_source: no source reviews");
  src.states = nd::concat_rows(states);
  src.keys = nd::concat_rows(key_blocks);
  return src;
}

DecoderState initial_state(const Weights& w, nd::Var code) {
  auto& tape = code.tape();
  return {nd::tanh(nd::affine(code, w.init_w, w.init_b)), tape.constant(nd::Tensor(w.config->hidden_dim)), code};
}

Attention attend(const Weights& w, nd::Var query, const CopySource& source) {
  if (source.positions() == 0) throw std::invalid_argument("attend: empty source");
  nd::Var projected = nd::add(nd::matvec(w.att_query_w, query), w.att_b);
  nd::Var hidden = nd::tanh(nd::add_row(source.keys, projected));
  nd::Var scores = nd::matvec(hidden, nd::row(w.att_v, 0));
  nd::Var weights = nd::softmax(scores);
  return {nd::matvec_t(source.states, weights), weights};
}

std::pair<DecoderState, std::optional<Attention>> decode_step(const Weights& w, const DecoderState& state,
                                                              nd::Var input_embedding,
                                                              const CopySource* source) {
  nd::Var input = nd::concat({input_embedding, state.context, state.code});
  nd::Var hidden = nd::gru_cell(input, state.hidden, w.decoder);
  if (!w.config->uses_attention() || source == nullptr) {
    return {DecoderState{hidden, state.context, state.code}, std::nullopt};
  }
  Attention att = attend(w, hidden, *source);
  return {DecoderState{hidden, att.context, state.code}, att};
}

nd::Var copy_gate(const Weights& w, nd::Var hidden, nd::Var context, nd::Var input_embedding) {
  return nd::sigmoid(nd::ffnn_tanh(nd::concat({hidden, context, input_embedding}), w.gate));
}

OutputDistribution output_distribution(const Weights& w, nd::Var hidden, nd::Var context,
                                       nd::Var attention_weights, nd::Var p_gen,
                                       std::span<const TokenId> source_ids, std::size_t extended_size) {
  const std::size_t v = w.config->vocab_size;
  if (extended_size < v) throw std::invalid_argument("output_distribution: extended size below V");
  OutputDistribution out;
  out.p_vocab = nd::softmax(nd::affine(nd::concat({hidden, context}), w.out_w, w.out_b));
  nd::Var generated = nd::pad_to(out.p_vocab, extended_size);
  if (!attention_weights.valid()) {
    out.distribution = generated;
    return out;
  }
  if (attention_weights.size() != source_ids.size())
    throw std::invalid_argument("output_distribution: attention and source lengths differ");
  out.p_copy = nd::scatter_add(attention_weights, source_ids, extended_size);
  out.distribution = nd::add(nd::scale_by(generated, p_gen), nd::scale_by(out.p_copy, nd::one_minus(p_gen)));
  return out;
}

StepResult decoder_step(const Weights& w, const DecoderState& state, TokenId input_token,
                        const CopySource* source, std::size_t extended_size) {
  nd::Var emb = embed_token(w, input_token);
  auto [next, att] = decode_step(w, state, emb, source);
  StepResult r;
  r.state = next;
  if (att) {
    r.attention = att->weights;
    r.p_gen = copy_gate(w, next.hidden, next.context, emb);
    r.output = output_distribution(w, next.hidden, next.context, att->weights, r.p_gen, source->ids,
                                   extended_size);
  } else {
    r.p_gen = emb.tape().constant(nd::Tensor::vector({1.0}));
    r.output = output_distribution(w, next.hidden, next.context, {}, r.p_gen, {}, extended_size);
  }
  return r;
}

ExtendedDistribution snapshot(const StepResult& step) {
  ExtendedDistribution d;
  d.probabilities = step.output.distribution.value().to_vector();
  d.p_vocab = step.output.p_vocab.value().to_vector();
  if (step.output.p_copy.valid()) {
    d.p_copy = step.output.p_copy.value().to_vector();
  } else {
    d.p_copy.assign(d.probabilities.size(), 0.0);
  }
  if (step.attention.valid()) d.attention = step.attention.value().to_vector();
  d.p_gen = step.p_gen.scalar();
  return d;
}

nd::Var review_log_likelihood(const Weights& w, nd::Var code, std::span<const TokenId> token_ids,
                              std::span<const TokenId> extended_ids, const CopySource* source,
                              std::size_t extended_size) {
  if (token_ids.size() != extended_ids.size())
    throw std::invalid_argument("review_log_likelihood: id length mismatch");
  DecoderState state = initial_state(w, code);
  std::vector<nd::Var> terms;
  terms.reserve(token_ids.size() + 1);
  TokenId input = kBos;
  for (std::size_t t = 0; t <= token_ids.size(); ++t) {
    const TokenId target = t < token_ids.size() ? extended_ids[t] : kEos;
    if (target >= extended_size) throw std::out_of_range("review_log_likelihood: target outside extended vocabulary");
    StepResult step = decoder_step(w, state, input, source, extended_size);
    terms.push_back(nd::log_floor(nd::pick(step.output.distribution, target), kLogFloor));
    state = step.state;
    if (t < token_ids.size()) input = token_ids[t];
  }
  return nd::sum(nd::concat(terms));
}

}  // namespace copycat
