#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>

#include "copycat/ndiff.hpp"
#include "copycat/parameters.hpp"

namespace copycat {

enum class Ablation {
  Full,
  NoAttention,  // zero context, copy path off (p_gen = 1)
  NoC,          // no group code; z ~ q(z | r_i) with an N(0, I) prior
  NoZ,          // no review code; the decoder is seeded by c
};

std::string to_string(Ablation a);
// Throws std::invalid_argument for unknown names.
Ablation parse_ablation(std::string_view name);

struct ModelConfig {
  std::size_t vocab_size = 50000;
  std::size_t embed_dim = 200;
  std::size_t hidden_dim = 600;
  std::size_t c_dim = 600;
  std::size_t z_dim = 600;
  std::size_t alpha_hidden = 300;
  std::size_t attention_hidden = 200;
  std::size_t gate_hidden = 100;
  Ablation ablation = Ablation::Full;

  bool uses_c() const { return ablation != Ablation::NoC; }
  bool uses_z() const { return ablation != Ablation::NoZ; }
  bool uses_attention() const { return ablation != Ablation::NoAttention; }
  // Size of the code that seeds the decoder: z, or c when z is ablated.
  std::size_t decoder_code_dim() const { return uses_z() ? z_dim : c_dim; }
  void validate() const;
};

// Owns every learned tensor. The parameter set depends on the ablation:
// removed components have no parameters at all.
class Model {
 public:
  explicit Model(ModelConfig config);

  const ModelConfig& config() const { return config_; }
  nd::ParameterStore& params() { return params_; }
  const nd::ParameterStore& params() const { return params_; }

  // Xavier/normal init; the PAD embedding row is zeroed afterwards.
  void initialize(std::uint64_t seed);

  // Replaces parameter values; names and shapes must match this model.
  void load_parameters(const nd::ParameterStore& stored);

 private:
  ModelConfig config_;
  nd::ParameterStore params_;
};

// Parameter handles bound to one tape.
struct Weights {
  const ModelConfig* config = nullptr;

  nd::Var embedding;  // [V x E], shared by encoder and decoder inputs
  nd::GruWeights encoder;

  nd::FfnnWeights alpha;  // word-importance scorer, no output bias
  nd::Var c_mean_w, c_mean_b, c_logvar_w, c_logvar_b;

  nd::Var zp_mean_w, zp_mean_b, zp_logvar_w, zp_logvar_b;  // p(z | c)
  nd::Var zq_mean_w, zq_mean_b, zq_logvar_w, zq_logvar_b;  // q(z | r_i, c)

  nd::Var init_w, init_b;  // s_0 = tanh(init_w code + init_b)
  nd::GruWeights decoder;

  // Additive attention v^T tanh(Ws s + Wh h + b); its first layer is stored
  // split by input block.
  nd::Var att_query_w, att_key_w, att_b, att_v;
  nd::FfnnWeights gate;  // copy gate scorer over [s, ctx, w]
  nd::Var out_w, out_b;  // [V x 2H] generation projection

  static Weights bind(nd::Tape& tape, Model& model);
};

}  // namespace copycat
