#include "copycat/encoder.hpp"

#include <stdexcept>

namespace copycat {

nd::Var embed_token(const Weights& w, TokenId id) {
  const auto& table = w.embedding.value();
  if (id >= table.rows()) throw std::out_of_range("embedding id outside the fixed vocabulary");
  if (id == kPad) return w.embedding.tape().constant(nd::Tensor(table.cols()));
  return nd::row(w.embedding, id);
}

nd::Var embed(const Weights& w, std::span<const TokenId> ids) {
  if (ids.empty()) throw std::invalid_argument("embed: empty id sequence");
  std::vector<nd::Var> rows;
  rows.reserve(ids.size());
  for (TokenId id : ids) rows.push_back(embed_token(w, id));
  return nd::stack_rows(rows);
}

EncodedReview encode_review(const Weights& w, std::span<const TokenId> ids,
                            std::span<const TokenId> extended_ids, const std::vector<bool>* padding) {
  if (ids.size() != extended_ids.size()) throw std::invalid_argument("encode_review: id length mismatch");
  if (padding != nullptr && padding->size() != ids.size())
    throw std::invalid_argument("encode_review: padding length mismatch");
  auto& tape = w.embedding.tape();
  const std::size_t hd = w.config->hidden_dim;

  std::vector<nd::Var> emb, hid, cat;
  EncodedReview out;
  nd::Var h = tape.constant(nd::Tensor(hd));
  for (std::size_t t = 0; t < ids.size(); ++t) {
    if (padding != nullptr && (*padding)[t]) continue;
    nd::Var x = embed_token(w, ids[t]);
    h = nd::gru_cell(x, h, w.encoder);
    emb.push_back(x);
    hid.push_back(h);
    cat.push_back(nd::concat({h, x}));
    out.extended_ids.push_back(extended_ids[t]);
  }
  if (hid.empty()) throw std::invalid_argument("encode_review: empty review");
  out.length = hid.size();
  out.embeddings = nd::stack_rows(emb);
  out.hidden = nd::stack_rows(hid);
  out.states = nd::stack_rows(cat);
  out.final_state = h;
  return out;
}

EncodedReview encode_review(const Weights& w, const Review& review) {
  return encode_review(w, review.token_ids, review.extended_ids);
}

}  // namespace copycat
