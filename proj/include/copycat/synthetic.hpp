#pragma once

#include <cstddef>
#include <set>
#include <string>
#include <vector>

#include "copycat/corpus.hpp"
#include "copycat/model.hpp"

namespace copycat {

// Small templated corpus for end-to-end checks: five groups of eight
// reviews. Each group has its own content words, shared by most of its
// reviews; every review also carries two noise words from a pool shared by
// all groups. Six reviews of the first group mention an entity that the
// vocabulary leaves out, so it can only be produced by copying.
struct SyntheticCorpus {
  std::vector<ReviewGroup> groups;
  Vocabulary vocab;
  // Per group: words of that group only that occur in at least half of
  // its reviews.
  std::vector<std::set<std::string>> consensus_tokens;
  std::string entity;
  std::size_t entity_group = 0;
};

SyntheticCorpus make_synthetic_corpus();

// Tiny model and one three-review group with an out-of-vocabulary token,
// sized so that finite-difference gradient checks run in seconds.
struct TinySetup {
  ModelConfig config;
  Vocabulary vocab;
  ReviewGroup group;  // ids assigned
};

TinySetup make_tiny_setup(Ablation ablation = Ablation::Full);

}  // namespace copycat
