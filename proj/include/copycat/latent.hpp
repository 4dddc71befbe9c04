#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "copycat/encoder.hpp"
#include "copycat/model.hpp"

namespace copycat {

// Diagonal Gaussian parameterized by mean and log-variance.
struct DiagGaussian {
  nd::Var mean;
  nd::Var log_variance;

  std::size_t dim() const { return mean.size(); }
};

struct GroupPosteriorTrace {
  // weights[i][t]: importance of word t of review i; sums to 1 over the group.
  std::vector<std::vector<double>> weights;
  nd::Var pooled;  // sum_i sum_t alpha_i^t m_i^t
};

// q(c | r_1..N): scores every word state m_i^t with the tanh scorer,
// softmax-normalizes over all words of the group, pools the states, and
// maps the pooled vector to mean and log-variance with two affine heads.
std::pair<DiagGaussian, GroupPosteriorTrace> infer_group_posterior(const Weights& w,
                                                                   std::span<const EncodedReview> reviews);

// N(0, I) of the given dimension.
DiagGaussian standard_normal(nd::Tape& tape, std::size_t dim);
DiagGaussian prior_c(nd::Tape& tape, std::size_t dim);

// p(z | c): independent affine heads of c for mean and log-variance.
DiagGaussian prior_z_given_c(const Weights& w, nd::Var c);

// q(z | r_i, c): affine heads of [h_T, c]; in the no_c variant pass an
// invalid c and the heads read h_T alone.
DiagGaussian infer_review_posterior(const Weights& w, nd::Var final_state, nd::Var c);

nd::Var kl_divergence(const DiagGaussian& q, const DiagGaussian& p);

// mean + exp(log_variance / 2) * noise
nd::Var reparameterize(const DiagGaussian& g, nd::Var noise);

// Value-only helper for callers without a tape.
double kl_divergence(std::span<const double> mean_q, std::span<const double> logvar_q,
                     std::span<const double> mean_p, std::span<const double> logvar_p);

}  // namespace copycat
