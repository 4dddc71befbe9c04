#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "copycat/corpus.hpp"
#include "copycat/model.hpp"

namespace copycat {

// Cyclical KL annealing: within each cycle beta ramps linearly from 0 to its
// maximum over the first ramp_fraction of the steps, then holds. Both terms
// share the phase.
struct AnnealSchedule {
  std::size_t cycle_length = 0;  // 0 means "two epochs of steps"
  double ramp_fraction = 0.8;
  double beta_max_z = 1.0;
  double beta_max_c = 0.3;
};

struct Betas {
  double z = 0.0;
  double c = 0.0;
};

Betas anneal_beta(std::size_t step, const AnnealSchedule& schedule);

enum class GenerationMode { Mean, Sample };
std::string to_string(GenerationMode m);
GenerationMode parse_generation_mode(std::string_view name);

struct TrainConfig {
  ModelConfig model;
  double learning_rate = 8e-4;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_epsilon = 1e-8;
  std::size_t group_size = 8;
  std::size_t groups_per_step = 1;
  std::size_t steps = 1000;
  std::size_t max_extended = Vocabulary::kDefaultMaxExtended;
  AnnealSchedule schedule;
  double grad_clip = 5.0;  // global norm; 0 disables
  std::size_t checkpoint_interval = 0;
  std::uint64_t seed = 1;
  GenerationMode generation_mode = GenerationMode::Mean;
  std::size_t beam_width = 5;
  std::size_t max_summary_len = 80;

  void validate() const;
};

// Sets the ablation variant; throws std::invalid_argument for unknown names.
TrainConfig apply_ablation(TrainConfig config, std::string_view variant);

struct LossBreakdown {
  double reconstruction = 0.0;  // sum_i log p(r_i | z_i, r_-i), <= 0
  double kl_z = 0.0;
  double kl_c = 0.0;
  double beta_z = 0.0;
  double beta_c = 0.0;
  double total = 0.0;  // -reconstruction + beta_z kl_z + beta_c kl_c
  std::size_t tokens = 0;  // predicted tokens including EOS
  std::size_t floor_events = 0;

  LossBreakdown& operator+=(const LossBreakdown& other);
};

// Standard-normal draws for one group: one for c, one per review for z.
struct ElboNoise {
  std::vector<double> c;
  std::vector<std::vector<double>> z;

  static ElboNoise zeros(const ModelConfig& config, std::size_t reviews);
  static ElboNoise draw(std::mt19937_64& rng, const ModelConfig& config, std::size_t reviews);
};

struct ElboResult {
  nd::Var total;
  LossBreakdown breakdown;
};

// One-sample estimate of the negated, beta-weighted bound for one group.
// The group must have ids assigned (assign_ids).
ElboResult elbo(const Weights& w, const ReviewGroup& group, const ElboNoise& noise, double beta_z, double beta_c);

class AdamOptimizer {
 public:
  AdamOptimizer(double learning_rate, double beta1 = 0.9, double beta2 = 0.999, double epsilon = 1e-8);
  void step(nd::ParameterStore& params);
  std::size_t steps_taken() const { return t_; }

 private:
  double lr_, b1_, b2_, eps_;
  std::size_t t_ = 0;
  std::vector<nd::Tensor> m_, v_;
};

// Scales gradients so their global norm is at most max_norm. Returns the
// norm before clipping.
double clip_gradients(nd::ParameterStore& params, double max_norm);

struct StepLog {
  std::size_t step = 0;
  LossBreakdown loss;  // summed over the groups of the step
};

class TrainingError : public std::runtime_error {
 public:
  TrainingError(const std::string& group_id, const std::string& what)
      : std::runtime_error(what), group_id_(group_id) {}
  const std::string& group_id() const { return group_id_; }

 private:
  std::string group_id_;
};

struct TrainHooks {
  std::function<void(const StepLog&)> on_step;
  // Called every checkpoint_interval steps with the number of completed steps.
  std::function<void(std::size_t, const Model&)> on_checkpoint;
};

struct TrainResult {
  Model model;
  std::vector<StepLog> log;
  AnnealSchedule schedule;  // with the resolved cycle length
};

// Adam over shuffled group batches; deterministic for a fixed seed.
TrainResult train(std::vector<ReviewGroup> corpus, const Vocabulary& vocab, const TrainConfig& config,
                  const TrainHooks& hooks = {});

// Forward-only loss of a group under the given noise.
LossBreakdown evaluate_group(Model& model, ReviewGroup group, const Vocabulary& vocab, const ElboNoise& noise,
                             double beta_z = 1.0, double beta_c = 1.0);

}  // namespace copycat
