#include "copycat/config.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <stdexcept>

namespace copycat {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::size_t to_size(const std::string& key, const std::string& v) {
  std::size_t out = 0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size())
    throw std::invalid_argument("config: " + key + " expects a non-negative integer, got '" + v + "'");
  return out;
}

double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const double d = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw std::invalid_argument("config: " + key + " expects a number, got '" + v + "'");
  }
}

}  // namespace

bool read_config(std::istream& in, TrainConfig& c) {
  bool seed_set = false;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config line " + std::to_string(line_no) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    auto& m = c.model;
    if (key == "vocab_size") m.vocab_size = to_size(key, val);
    else if (key == "embed_dim") m.embed_dim = to_size(key, val);
    else if (key == "hidden_dim") m.hidden_dim = to_size(key, val);
    else if (key == "c_dim") m.c_dim = to_size(key, val);
    else if (key == "z_dim") m.z_dim = to_size(key, val);
    else if (key == "alpha_hidden") m.alpha_hidden = to_size(key, val);
    else if (key == "attention_hidden") m.attention_hidden = to_size(key, val);
    else if (key == "gate_hidden") m.gate_hidden = to_size(key, val);
    else if (key == "ablation") m.ablation = parse_ablation(val);
    else if (key == "learning_rate") c.learning_rate = to_double(key, val);
    else if (key == "adam_beta1") c.adam_beta1 = to_double(key, val);
    else if (key == "adam_beta2") c.adam_beta2 = to_double(key, val);
    else if (key == "adam_epsilon") c.adam_epsilon = to_double(key, val);
    else if (key == "group_size") c.group_size = to_size(key, val);
    else if (key == "groups_per_step") c.groups_per_step = to_size(key, val);
    else if (key == "steps") c.steps = to_size(key, val);
    else if (key == "max_extended") c.max_extended = to_size(key, val);
    else if (key == "cycle_length") c.schedule.cycle_length = to_size(key, val);
    else if (key == "ramp_fraction") c.schedule.ramp_fraction = to_double(key, val);
    else if (key == "beta_max_z") c.schedule.beta_max_z = to_double(key, val);
    else if (key == "beta_max_c") c.schedule.beta_max_c = to_double(key, val);
    else if (key == "grad_clip") c.grad_clip = to_double(key, val);
    else if (key == "checkpoint_interval") c.checkpoint_interval = to_size(key, val);
    else if (key == "seed") {
      c.seed = to_size(key, val);
      seed_set = true;
    } else if (key == "generation_mode") c.generation_mode = parse_generation_mode(val);
    else if (key == "beam_width") c.beam_width = to_size(key, val);
    else if (key == "max_summary_len") c.max_summary_len = to_size(key, val);
    else throw std::invalid_argument("config line " + std::to_string(line_no) + ": unknown key '" + key + "'");
  }
  return seed_set;
}

TrainConfig read_config_file(const std::string& path, bool require_seed) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config " + path);
  TrainConfig c;
  const bool seed_set = read_config(in, c);
  if (require_seed && !seed_set) throw std::invalid_argument("config " + path + " must set 'seed'");
  return c;
}

nlohmann::json to_json(const TrainConfig& c) {
  const auto& m = c.model;
  return {
      {"vocab_size", m.vocab_size},
      {"embed_dim", m.embed_dim},
      {"hidden_dim", m.hidden_dim},
      {"c_dim", m.c_dim},
      {"z_dim", m.z_dim},
      {"alpha_hidden", m.alpha_hidden},
      {"attention_hidden", m.attention_hidden},
      {"gate_hidden", m.gate_hidden},
      {"ablation", to_string(m.ablation)},
      {"learning_rate", c.learning_rate},
      {"adam_beta1", c.adam_beta1},
      {"adam_beta2", c.adam_beta2},
      {"adam_epsilon", c.adam_epsilon},
      {"group_size", c.group_size},
      {"groups_per_step", c.groups_per_step},
      {"steps", c.steps},
      {"max_extended", c.max_extended},
      {"cycle_length", c.schedule.cycle_length},
      {"ramp_fraction", c.schedule.ramp_fraction},
      {"beta_max_z", c.schedule.beta_max_z},
      {"beta_max_c", c.schedule.beta_max_c},
      {"grad_clip", c.grad_clip},
      {"checkpoint_interval", c.checkpoint_interval},
      {"seed", c.seed},
      {"generation_mode", to_string(c.generation_mode)},
      {"beam_width", c.beam_width},
      {"max_summary_len", c.max_summary_len},
  };
}

TrainConfig train_config_from_json(const nlohmann::json& j) {
  TrainConfig c;
  auto& m = c.model;
  m.vocab_size = j.at("vocab_size");
  m.embed_dim = j.at("embed_dim");
  m.hidden_dim = j.at("hidden_dim");
  m.c_dim = j.at("c_dim");
  m.z_dim = j.at("z_dim");
  m.alpha_hidden = j.at("alpha_hidden");
  m.attention_hidden = j.at("attention_hidden");
  m.gate_hidden = j.at("gate_hidden");
  m.ablation = parse_ablation(j.at("ablation").get<std::string>());
  c.learning_rate = j.at("learning_rate");
  c.adam_beta1 = j.at("adam_beta1");
  c.adam_beta2 = j.at("adam_beta2");
  c.adam_epsilon = j.at("adam_epsilon");
  c.group_size = j.at("group_size");
  c.groups_per_step = j.at("groups_per_step");
  c.steps = j.at("steps");
  c.max_extended = j.at("max_extended");
  c.schedule.cycle_length = j.at("cycle_length");
  c.schedule.ramp_fraction = j.at("ramp_fraction");
  c.schedule.beta_max_z = j.at("beta_max_z");
  c.schedule.beta_max_c = j.at("beta_max_c");
  c.grad_clip = j.at("grad_clip");
  c.checkpoint_interval = j.at("checkpoint_interval");
  c.seed = j.at("seed");
  c.generation_mode = parse_generation_mode(j.at("generation_mode").get<std::string>());
  c.beam_width = j.at("beam_width");
  c.max_summary_len = j.at("max_summary_len");
  return c;
}

}  // namespace copycat
