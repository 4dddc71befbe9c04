#pragma once

#include <iosfwd>
#include <string>

#include <nlohmann/json.hpp>

#include "copycat/objective.hpp"

namespace copycat {

// Key-value config files: one `key = value` per line, `#` starts a comment.
// Recognized keys mirror TrainConfig:
//   vocab_size embed_dim hidden_dim c_dim z_dim alpha_hidden attention_hidden
//   gate_hidden ablation learning_rate adam_beta1 adam_beta2 adam_epsilon
//   group_size groups_per_step steps max_extended cycle_length ramp_fraction
//   beta_max_z beta_max_c grad_clip checkpoint_interval seed generation_mode
//   beam_width max_summary_len
// Unknown keys are rejected. Returns whether `seed` was set explicitly.
bool read_config(std::istream& in, TrainConfig& config);
TrainConfig read_config_file(const std::string& path, bool require_seed = true);

nlohmann::json to_json(const TrainConfig& config);
TrainConfig train_config_from_json(const nlohmann::json& j);

}  // namespace copycat
