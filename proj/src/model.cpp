#include "copycat/model.hpp"

#include <stdexcept>

#include "copycat/corpus.hpp"

namespace copycat {

std::string to_string(Ablation a) {
  switch (a) {
    case Ablation::Full:
      return "full";
    case Ablation::NoAttention:
      return "no_attention";
    case Ablation::NoC:
      return "no_c";
    case Ablation::NoZ:
      return "no_z";
  }
  return "full";
}

Ablation parse_ablation(std::string_view name) {
  if (name == "full") return Ablation::Full;
  if (name == "no_attention") return Ablation::NoAttention;
  if (name == "no_c") return Ablation::NoC;
  if (name == "no_z") return Ablation::NoZ;
  throw std::invalid_argument("unknown ablation variant: " + std::string(name));
}

void ModelConfig::validate() const {
  if (vocab_size < kSpecialCount) throw std::invalid_argument("vocab_size must be at least 4");
  if (embed_dim == 0 || hidden_dim == 0 || c_dim == 0 || z_dim == 0 || alpha_hidden == 0 ||
      attention_hidden == 0 || gate_hidden == 0)
    throw std::invalid_argument("model dimensions must be positive");
}

Model::Model(ModelConfig config) : config_(config) {
  config_.validate();
  using nd::Init;
  const auto& c = config_;
  const std::size_t v = c.vocab_size, e = c.embed_dim, h = c.hidden_dim;
  const std::size_t m = h + e;

  params_.add("embedding", v, e, Init::Matrix);
  params_.add("encoder.input", 3 * h, e, Init::Matrix);
  params_.add("encoder.recurrent", 3 * h, h, Init::Matrix);
  params_.add("encoder.bias", 3 * h, Init::Vector);

  if (c.uses_c()) {
    params_.add("alpha.hidden", c.alpha_hidden, m, Init::Matrix);
    params_.add("alpha.hidden_bias", c.alpha_hidden, Init::Vector);
    params_.add("alpha.output", 1, c.alpha_hidden, Init::Matrix);
    params_.add("c_mean.weight", c.c_dim, m, Init::Matrix);
    params_.add("c_mean.bias", c.c_dim, Init::Vector);
    params_.add("c_logvar.weight", c.c_dim, m, Init::Matrix);
    params_.add("c_logvar.bias", c.c_dim, Init::Vector);
  }
  if (c.uses_z()) {
    if (c.uses_c()) {
      params_.add("z_prior_mean.weight", c.z_dim, c.c_dim, Init::Matrix);
      params_.add("z_prior_mean.bias", c.z_dim, Init::Vector);
      params_.add("z_prior_logvar.weight", c.z_dim, c.c_dim, Init::Matrix);
      params_.add("z_prior_logvar.bias", c.z_dim, Init::Vector);
    }
    const std::size_t q_in = c.uses_c() ? h + c.c_dim : h;
    params_.add("z_post_mean.weight", c.z_dim, q_in, Init::Matrix);
    params_.add("z_post_mean.bias", c.z_dim, Init::Vector);
    params_.add("z_post_logvar.weight", c.z_dim, q_in, Init::Matrix);
    params_.add("z_post_logvar.bias", c.z_dim, Init::Vector);
  }

  const std::size_t code = c.decoder_code_dim();
  params_.add("decoder_init.weight", h, code, Init::Matrix);
  params_.add("decoder_init.bias", h, Init::Vector);
  params_.add("decoder.input", 3 * h, e + h + code, Init::Matrix);
  params_.add("decoder.recurrent", 3 * h, h, Init::Matrix);
  params_.add("decoder.bias", 3 * h, Init::Vector);

  if (c.uses_attention()) {
    params_.add("attention.query", c.attention_hidden, h, Init::Matrix);
    params_.add("attention.key", c.attention_hidden, h, Init::Matrix);
    params_.add("attention.bias", c.attention_hidden, Init::Vector);
    params_.add("attention.v", 1, c.attention_hidden, Init::Matrix);
    params_.add("gate.hidden", c.gate_hidden, 2 * h + e, Init::Matrix);
    params_.add("gate.hidden_bias", c.gate_hidden, Init::Vector);
    params_.add("gate.output", 1, c.gate_hidden, Init::Matrix);
    params_.add("gate.output_bias", 1, Init::Vector);
  }

  params_.add("output.weight", v, 2 * h, Init::Matrix);
  params_.add("output.bias", v, Init::Vector);
}

void Model::initialize(std::uint64_t seed) {
  params_.initialize(seed);
  auto& emb = params_.value("embedding");
  for (std::size_t c = 0; c < emb.cols(); ++c) emb.at(kPad, c) = 0.0;
}

void Model::load_parameters(const nd::ParameterStore& stored) {
  const auto mine = params_.entries();
  const auto theirs = stored.entries();
  if (mine.size() != theirs.size())
    throw std::runtime_error("checkpoint parameter count does not match the model configuration");
  for (std::size_t i = 0; i < mine.size(); ++i) {
    if (mine[i].name != theirs[i].name || !mine[i].value.same_shape(theirs[i].value))
      throw std::runtime_error("checkpoint parameter mismatch at " + theirs[i].name);
    mine[i].value = theirs[i].value;
  }
}

Weights Weights::bind(nd::Tape& tape, Model& model) {
  auto& p = model.params();
  const auto& c = model.config();
  auto get = [&](const char* name) { return tape.parameter(p, name); };
  Weights w;
  w.config = &c;
  w.embedding = get("embedding");
  w.encoder = {get("encoder.input"), get("encoder.recurrent"), get("encoder.bias")};
  if (c.uses_c()) {
    w.alpha = {get("alpha.hidden"), get("alpha.hidden_bias"), get("alpha.output"), {}};
    w.c_mean_w = get("c_mean.weight");
    w.c_mean_b = get("c_mean.bias");
    w.c_logvar_w = get("c_logvar.weight");
    w.c_logvar_b = get("c_logvar.bias");
  }
  if (c.uses_z()) {
    if (c.uses_c()) {
      w.zp_mean_w = get("z_prior_mean.weight");
      w.zp_mean_b = get("z_prior_mean.bias");
      w.zp_logvar_w = get("z_prior_logvar.weight");
      w.zp_logvar_b = get("z_prior_logvar.bias");
    }
    w.zq_mean_w = get("z_post_mean.weight");
    w.zq_mean_b = get("z_post_mean.bias");
    w.zq_logvar_w = get("z_post_logvar.weight");
    w.zq_logvar_b = get("z_post_logvar.bias");
  }
  w.init_w = get("decoder_init.weight");
  w.init_b = get("decoder_init.bias");
  w.decoder = {get("decoder.input"), get("decoder.recurrent"), get("decoder.bias")};
  if (c.uses_attention()) {
    w.att_query_w = get("attention.query");
    w.att_key_w = get("attention.key");
    w.att_b = get("attention.bias");
    w.att_v = get("attention.v");
    w.gate = {get("gate.hidden"), get("gate.hidden_bias"), get("gate.output"), get("gate.output_bias")};
  }
  w.out_w = get("output.weight");
  w.out_b = get("output.bias");
  return w;
}

}  // namespace copycat
