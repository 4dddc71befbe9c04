#include "copycat/checkpoint.hpp"

#include <array>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>

#include "copycat/config.hpp"

namespace copycat {

namespace {

constexpr std::array<char, 4> kMagic = {'C', 'C', 'K', 'P'};

void write_u64(std::ostream& out, std::uint64_t v) {
  std::array<unsigned char, 8> b{};
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  out.write(reinterpret_cast<const char*>(b.data()), 8);
}

void write_u32(std::ostream& out, std::uint32_t v) {
  std::array<unsigned char, 4> b{};
  for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  out.write(reinterpret_cast<const char*>(b.data()), 4);
}

std::uint64_t read_uint(std::istream& in, int bytes) {
  std::array<unsigned char, 8> b{};
  in.read(reinterpret_cast<char*>(b.data()), bytes);
  if (!in) throw std::runtime_error("checkpoint: truncated header");
  std::uint64_t v = 0;
  for (int i = 0; i < bytes; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  return v;
}

}  // namespace

void save_checkpoint(std::ostream& out, const Model& model, const TrainConfig& config, const Vocabulary& vocab,
                     std::size_t step) {
  nlohmann::json meta;
  meta["config"] = to_json(config);
  meta["config"]["ablation"] = to_string(model.config().ablation);
  meta["vocabulary"] = vocab.tokens();
  meta["step"] = step;
  const std::string text = meta.dump();

  out.write(kMagic.data(), kMagic.size());
  write_u32(out, Checkpoint::kVersion);
  write_u64(out, step);
  write_u64(out, text.size());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  model.params().save(out);
  if (!out) throw std::runtime_error("checkpoint: write failed");
}

void save_checkpoint_file(const std::string& path, const Model& model, const TrainConfig& config,
                          const Vocabulary& vocab, std::size_t step) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write checkpoint " + path);
  save_checkpoint(out, model, config, vocab, step);
}

Checkpoint load_checkpoint(std::istream& in) {
  std::array<char, 4> magic{};
  in.read(magic.data(), magic.size());
  if (!in || magic != kMagic) throw std::runtime_error("checkpoint: not a model checkpoint");
  const auto version = static_cast<std::uint32_t>(read_uint(in, 4));
  if (version != Checkpoint::kVersion)
    throw std::runtime_error("checkpoint: incompatible version " + std::to_string(version));
  const auto step = read_uint(in, 8);
  const auto len = read_uint(in, 8);
  std::string text(len, '\0');
  in.read(text.data(), static_cast<std::streamsize>(len));
  if (!in) throw std::runtime_error("checkpoint: truncated metadata");
  const auto meta = nlohmann::json::parse(text);

  TrainConfig config = train_config_from_json(meta.at("config"));
  Vocabulary vocab =
      Vocabulary::from_tokens(meta.at("vocabulary").get<std::vector<std::string>>(), config.max_extended);
  if (vocab.size() != config.model.vocab_size)
    throw std::runtime_error("checkpoint: vocabulary size does not match the configuration");
  Model model(config.model);
  model.load_parameters(nd::ParameterStore::load(in));
  return Checkpoint{std::move(config), std::move(vocab), static_cast<std::size_t>(step), std::move(model)};
}

Checkpoint load_checkpoint_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open checkpoint " + path);
  return load_checkpoint(in);
}

}  // namespace copycat
