#include "copycat/objective.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include "copycat/decoder.hpp"
#include "copycat/encoder.hpp"
#include "copycat/latent.hpp"

namespace copycat {

Betas anneal_beta(std::size_t step, const AnnealSchedule& s) {
  if (s.cycle_length == 0) throw std::invalid_argument("anneal_beta: cycle length must be positive");
  const double pos = static_cast<double>(step % s.cycle_length);
  const double ramp = s.ramp_fraction * static_cast<double>(s.cycle_length);
  const double frac = pos < ramp ? pos / ramp : 1.0;
  return {s.beta_max_z * frac, s.beta_max_c * frac};
}

std::string to_string(GenerationMode m) { return m == GenerationMode::Mean ? "mean" : "sample"; }

GenerationMode parse_generation_mode(std::string_view name) {
  if (name == "mean") return GenerationMode::Mean;
  if (name == "sample") return GenerationMode::Sample;
  throw std::invalid_argument("unknown generation mode: " + std::string(name));
}

void TrainConfig::validate() const {
  model.validate();
  if (!(learning_rate >= 0.0)) throw std::invalid_argument("learning_rate must be non-negative");
  if (group_size == 0 || groups_per_step == 0) throw std::invalid_argument("group sizes must be positive");
  if (!(schedule.ramp_fraction > 0.0 && schedule.ramp_fraction <= 1.0))
    throw std::invalid_argument("ramp_fraction must lie in (0, 1]");
  if (schedule.beta_max_z < 0.0 || schedule.beta_max_c < 0.0)
    throw std::invalid_argument("beta maxima must be non-negative");
  if (grad_clip < 0.0) throw std::invalid_argument("grad_clip must be non-negative");
  if (beam_width == 0 || max_summary_len == 0) throw std::invalid_argument("beam settings must be positive");
  if (model.uses_attention() && group_size < 2)
    throw std::invalid_argument("attention over other reviews needs group_size >= 2");
}

TrainConfig apply_ablation(TrainConfig config, std::string_view variant) {
  config.model.ablation = parse_ablation(variant);
  return config;
}

LossBreakdown& LossBreakdown::operator+=(const LossBreakdown& o) {
  reconstruction += o.reconstruction;
  kl_z += o.kl_z;
  kl_c += o.kl_c;
  total += o.total;
  tokens += o.tokens;
  floor_events += o.floor_events;
  beta_z = o.beta_z;
  beta_c = o.beta_c;
  return *this;
}

ElboNoise ElboNoise::zeros(const ModelConfig& config, std::size_t reviews) {
  ElboNoise n;
  n.c.assign(config.c_dim, 0.0);
  n.z.assign(reviews, std::vector<double>(config.z_dim, 0.0));
  return n;
}

ElboNoise ElboNoise::draw(std::mt19937_64& rng, const ModelConfig& config, std::size_t reviews) {
  std::normal_distribution<double> normal(0.0, 1.0);
  ElboNoise n = zeros(config, reviews);
  for (double& v : n.c) v = normal(rng);
  for (auto& z : n.z)
    for (double& v : z) v = normal(rng);
  return n;
}

ElboResult elbo(const Weights& w, const ReviewGroup& group, const ElboNoise& noise, double beta_z, double beta_c) {
  const ModelConfig& cfg = *w.config;
  auto& tape = w.embedding.tape();
  const std::size_t n = group.reviews.size();
  if (n == 0) throw std::invalid_argument("elbo: empty group");
  if (noise.z.size() < n) throw std::invalid_argument("elbo: missing z noise");
  const std::size_t extended = cfg.vocab_size + group.oov.size();
  const std::size_t floors_before = tape.floor_events();

  std::vector<EncodedReview> encoded;
  encoded.reserve(n);
  for (const auto& r : group.reviews) encoded.push_back(encode_review(w, r));
  const std::vector<nd::Var> keys = attention_keys(w, encoded);

  auto vec = [&](const std::vector<double>& v) { return tape.constant(nd::Tensor::vector(v)); };

  LossBreakdown out;
  out.beta_z = beta_z;
  out.beta_c = beta_c;

  nd::Var c;
  nd::Var kl_c;
  if (cfg.uses_c()) {
    auto [q_c, trace] = infer_group_posterior(w, encoded);
    c = reparameterize(q_c, vec(noise.c));
    kl_c = kl_divergence(q_c, prior_c(tape, cfg.c_dim));
    out.kl_c = kl_c.scalar();
  }

  std::vector<nd::Var> recon_terms, kl_z_terms;
  for (std::size_t i = 0; i < n; ++i) {
    nd::Var code = c;
    if (cfg.uses_z()) {
      DiagGaussian q_z = infer_review_posterior(w, encoded[i].final_state, c);
      DiagGaussian p_z = cfg.uses_c() ? prior_z_given_c(w, c) : standard_normal(tape, cfg.z_dim);
      code = reparameterize(q_z, vec(noise.z[i]));
      kl_z_terms.push_back(kl_divergence(q_z, p_z));
    }
    std::optional<CopySource> source;
    if (cfg.uses_attention()) source = make_copy_source(encoded, keys, i);
    const Review& r = group.reviews[i];
    recon_terms.push_back(review_log_likelihood(w, code, r.token_ids, r.extended_ids,
                                                source ? &*source : nullptr, extended));
    out.tokens += r.length() + 1;
  }

  nd::Var recon = nd::sum(nd::concat(recon_terms));
  nd::Var total = nd::scale(recon, -1.0);
  out.reconstruction = recon.scalar();
  if (!kl_z_terms.empty()) {
    nd::Var kl_z = nd::sum(nd::concat(kl_z_terms));
    out.kl_z = kl_z.scalar();
    total = nd::add(total, nd::scale(kl_z, beta_z));
  }
  if (kl_c.valid()) total = nd::add(total, nd::scale(kl_c, beta_c));
  out.total = total.scalar();
  out.floor_events = tape.floor_events() - floors_before;
  return {total, out};
}

// ---- optimization -------------------------------------------------------------

AdamOptimizer::AdamOptimizer(double learning_rate, double beta1, double beta2, double epsilon)
    : lr_(learning_rate), b1_(beta1), b2_(beta2), eps_(epsilon) {}

void AdamOptimizer::step(nd::ParameterStore& params) {
  auto entries = params.entries();
  if (m_.empty()) {
    for (const auto& e : entries) {
      m_.push_back(e.value.rank() == 2 ? nd::Tensor(e.value.rows(), e.value.cols()) : nd::Tensor(e.value.size()));
      v_.push_back(m_.back());
    }
  }
  ++t_;
  const double c1 = 1.0 - std::pow(b1_, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(b2_, static_cast<double>(t_));
  for (std::size_t k = 0; k < entries.size(); ++k) {
    auto& e = entries[k];
    auto& m = m_[k];
    auto& v = v_[k];
    for (std::size_t i = 0; i < e.value.size(); ++i) {
      const double g = e.grad[i];
      m[i] = b1_ * m[i] + (1.0 - b1_) * g;
      v[i] = b2_ * v[i] + (1.0 - b2_) * g * g;
      e.value[i] -= lr_ * (m[i] / c1) / (std::sqrt(v[i] / c2) + eps_);
    }
  }
}

double clip_gradients(nd::ParameterStore& params, double max_norm) {
  const double norm = params.grad_norm();
  if (max_norm > 0.0 && norm > max_norm) {
    const double f = max_norm / norm;
    for (auto& e : params.entries())
      for (double& g : e.grad.values()) g *= f;
  }
  return norm;
}

TrainResult train(std::vector<ReviewGroup> corpus, const Vocabulary& vocab, const TrainConfig& config,
                  const TrainHooks& hooks) {
  config.validate();
  if (config.model.vocab_size != vocab.size())
    throw std::invalid_argument("train: model vocab_size does not match the vocabulary");
  if (corpus.empty()) throw std::invalid_argument("train: empty corpus");

  AnnealSchedule schedule = config.schedule;
  if (schedule.cycle_length == 0) {
    const std::size_t epoch = (corpus.size() + config.groups_per_step - 1) / config.groups_per_step;
    schedule.cycle_length = std::max<std::size_t>(1, 2 * epoch);
  }

  Vocabulary local_vocab = Vocabulary::from_tokens(vocab.tokens(), config.max_extended);
  TrainResult result{Model(config.model), {}, schedule};
  Model& model = result.model;
  model.initialize(config.seed);

  std::seed_seq batch_seed{config.seed, std::uint64_t{0x62617463}};
  std::seed_seq noise_seed{config.seed, std::uint64_t{0x6e6f6973}};
  std::mt19937_64 batch_rng(batch_seed);
  std::mt19937_64 noise_rng(noise_seed);
  BatchStream stream(std::move(corpus), local_vocab, config.group_size, config.groups_per_step, batch_rng());
  AdamOptimizer adam(config.learning_rate, config.adam_beta1, config.adam_beta2, config.adam_epsilon);

  for (std::size_t step = 0; step < config.steps; ++step) {
    const Betas beta = anneal_beta(step, schedule);
    Batch batch = stream.next();
    model.params().zero_grad();
    StepLog log;
    log.step = step;
    log.loss.beta_z = beta.z;
    log.loss.beta_c = beta.c;
    for (const auto& group : batch.groups) {
      const ElboNoise noise = ElboNoise::draw(noise_rng, config.model, group.reviews.size());
      nd::Tape tape;
      Weights w = Weights::bind(tape, model);
      ElboResult r = elbo(w, group, noise, beta.z, beta.c);
      if (!std::isfinite(r.breakdown.total))
        throw TrainingError(group.group_id, "non-finite loss at step " + std::to_string(step) + " in group " +
                                                group.group_id);
      tape.backward(r.total);
      log.loss += r.breakdown;
    }
    clip_gradients(model.params(), config.grad_clip);
    adam.step(model.params());
    if (hooks.on_step) hooks.on_step(log);
    result.log.push_back(log);
    if (config.checkpoint_interval > 0 && (step + 1) % config.checkpoint_interval == 0 && hooks.on_checkpoint)
      hooks.on_checkpoint(step + 1, model);
  }
  return result;
}

LossBreakdown evaluate_group(Model& model, ReviewGroup group, const Vocabulary& vocab, const ElboNoise& noise,
                             double beta_z, double beta_c) {
  assign_ids(group, vocab);
  nd::Tape tape(false);
  Weights w = Weights::bind(tape, model);
  return elbo(w, group, noise, beta_z, beta_c).breakdown;
}

}  // namespace copycat
