#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>

#include "copycat/corpus.hpp"
#include "copycat/model.hpp"
#include "copycat/objective.hpp"

namespace copycat {

// Self-contained model file: "CCKP", u32 version, u64 step, u64 metadata
// length, metadata JSON (config and vocabulary), then the parameter store
// block.
struct Checkpoint {
  static constexpr std::uint32_t kVersion = 1;

  TrainConfig config;
  Vocabulary vocab;
  std::size_t step = 0;
  Model model;
};

void save_checkpoint(std::ostream& out, const Model& model, const TrainConfig& config, const Vocabulary& vocab,
                     std::size_t step);
void save_checkpoint_file(const std::string& path, const Model& model, const TrainConfig& config,
                          const Vocabulary& vocab, std::size_t step);

// Rejects files with a different magic or version, or whose parameters do
// not match the embedded configuration.
Checkpoint load_checkpoint(std::istream& in);
Checkpoint load_checkpoint_file(const std::string& path);

}  // namespace copycat
