#include "copycat/latent.hpp"

#include <stdexcept>

namespace copycat {

std::pair<DiagGaussian, GroupPosteriorTrace> infer_group_posterior(const Weights& w,
                                                                   std::span<const EncodedReview> reviews) {
  if (reviews.empty()) throw std::invalid_argument("infer_group_posterior: empty group");
  if (!w.c_mean_w.valid()) throw std::logic_error("infer_group_posterior: model has no group code");

  std::vector<nd::Var> blocks;
  blocks.reserve(reviews.size());
  for (const auto& r : reviews) blocks.push_back(r.states);
  nd::Var states = nd::concat_rows(blocks);  // [sum T x (H + E)]

  // f(m) = u^T tanh(W m + b) for every row at once.
  nd::Var hidden = nd::tanh(nd::add_row(nd::matmul_nt(states, w.alpha.hidden), w.alpha.hidden_bias));
  nd::Var scores = nd::matvec(hidden, nd::row(w.alpha.output, 0));
  nd::Var alpha = nd::softmax(scores);
  nd::Var pooled = nd::matvec_t(states, alpha);

  GroupPosteriorTrace trace;
  trace.pooled = pooled;
  std::size_t off = 0;
  for (const auto& r : reviews) {
    auto& row = trace.weights.emplace_back(r.length);
    for (std::size_t t = 0; t < r.length; ++t) row[t] = alpha.value()[off + t];
    off += r.length;
  }

  DiagGaussian q{nd::affine(pooled, w.c_mean_w, w.c_mean_b), nd::affine(pooled, w.c_logvar_w, w.c_logvar_b)};
  return {q, std::move(trace)};
}

DiagGaussian standard_normal(nd::Tape& tape, std::size_t dim) {
  return {tape.constant(nd::Tensor(dim)), tape.constant(nd::Tensor(dim))};
}

DiagGaussian prior_c(nd::Tape& tape, std::size_t dim) { return standard_normal(tape, dim); }

DiagGaussian prior_z_given_c(const Weights& w, nd::Var c) {
  if (!w.zp_mean_w.valid()) throw std::logic_error("prior_z_given_c: model has no conditional z prior");
  return {nd::affine(c, w.zp_mean_w, w.zp_mean_b), nd::affine(c, w.zp_logvar_w, w.zp_logvar_b)};
}

DiagGaussian infer_review_posterior(const Weights& w, nd::Var final_state, nd::Var c) {
  if (!w.zq_mean_w.valid()) throw std::logic_error("infer_review_posterior: model has no review code");
  nd::Var input = c.valid() ? nd::concat({final_state, c}) : final_state;
  return {nd::affine(input, w.zq_mean_w, w.zq_mean_b), nd::affine(input, w.zq_logvar_w, w.zq_logvar_b)};
}

nd::Var kl_divergence(const DiagGaussian& q, const DiagGaussian& p) {
  if (q.dim() != p.dim()) throw std::invalid_argument("kl_divergence: dimension mismatch");
  return nd::kl_diag(q.mean, q.log_variance, p.mean, p.log_variance);
}

nd::Var reparameterize(const DiagGaussian& g, nd::Var noise) {
  if (noise.size() != g.dim()) throw std::invalid_argument("reparameterize: noise dimension mismatch");
  return nd::add(g.mean, nd::mul(nd::exp(nd::scale(g.log_variance, 0.5)), noise));
}

double kl_divergence(std::span<const double> mean_q, std::span<const double> logvar_q,
                     std::span<const double> mean_p, std::span<const double> logvar_p) {
  nd::Tape tape(false);
  auto vec = [&](std::span<const double> s) {
    return tape.constant(nd::Tensor::vector(std::vector<double>(s.begin(), s.end())));
  };
  DiagGaussian q{vec(mean_q), vec(logvar_q)};
  DiagGaussian p{vec(mean_p), vec(logvar_p)};
  return kl_divergence(q, p).scalar();
}

}  // namespace copycat
