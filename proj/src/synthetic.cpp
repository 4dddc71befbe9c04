#include "copycat/synthetic.hpp"

#include <array>
#include <map>

namespace copycat {

namespace {

struct Topic {
  const char* name;
  std::array<const char*, 4> words;  // noun, adjective, noun, adjective
};

constexpr std::array<Topic, 5> kTopics = {{
    {"g0", {"pizza", "crispy", "sauce", "tangy"}},
    {"g1", {"room", "spacious", "bed", "comfy"}},
    {"g2", {"battery", "durable", "screen", "bright"}},
    {"g3", {"coffee", "strong", "pastry", "flaky"}},
    {"g4", {"shoes", "sturdy", "laces", "long"}},
}};

constexpr std::array<const char*, 10> kNoise = {"honestly", "today", "again", "really", "maybe",
                                                "friends", "weekend", "later", "overall", "truly"};

constexpr const char* kEntity = "zoomtron";

std::string review_text(const Topic& t, std::size_t i, const std::string& a, const std::string& b, bool entity) {
  const std::string n1 = t.words[0], a1 = t.words[1], n2 = t.words[2], a2 = t.words[3];
  const std::string subject = entity ? std::string(kEntity) + " " + n1 : n1;
  switch (i % 4) {
    case 0:
      return "the " + subject + " was " + a1 + " and the " + n2 + " was " + a2 + ". " + a + " " + b + ".";
    case 1:
      return a + " the " + subject + " is " + a1 + ". the " + n2 + " is " + a2 + " " + b + ".";
    case 2:
      return "the " + n2 + " was " + a2 + " and the " + subject + " was " + a1 + " " + a + " " + b + ".";
    default:
      return a + " " + b + ", the " + subject + " is " + a1 + " and " + a2 + ".";
  }
}

}  // namespace

SyntheticCorpus make_synthetic_corpus() {
  SyntheticCorpus corpus;
  corpus.entity = kEntity;
  corpus.entity_group = 0;
  std::size_t slot = 0;
  for (std::size_t g = 0; g < kTopics.size(); ++g) {
    ReviewGroup group;
    group.group_id = kTopics[g].name;
    for (std::size_t i = 0; i < 8; ++i, ++slot) {
      // Each pool word is used exactly eight times over the 80 noise slots.
      const std::string a = kNoise[slot % kNoise.size()];
      const std::string b = kNoise[(slot + 3) % kNoise.size()];
      const bool entity = g == corpus.entity_group && i < 6;
      group.reviews.push_back(make_review(group.group_id + "_r" + std::to_string(i),
                                          review_text(kTopics[g], i, a, b, entity)));
    }
    corpus.groups.push_back(std::move(group));
  }

  // Every token except the entity: it appears six times, fewer than any
  // other token, so a frequency cut one short of the full count drops it.
  std::map<std::string, std::size_t> counts;
  for (const auto& g : corpus.groups)
    for (const auto& r : g.reviews)
      for (const auto& t : r.tokens) ++counts[t];
  corpus.vocab = build_vocabulary(std::span<const ReviewGroup>(corpus.groups),
                                  Vocabulary::specials().size() + counts.size() - 1);

  for (const auto& g : corpus.groups) {
    std::map<std::string, std::size_t> review_freq;
    for (const auto& r : g.reviews) {
      std::set<std::string> seen(r.tokens.begin(), r.tokens.end());
      for (const auto& t : seen) ++review_freq[t];
    }
    std::set<std::string> consensus;
    for (const auto& [token, n] : review_freq) {
      if (2 * n < g.size()) continue;
      bool exclusive = true;
      for (const auto& other : corpus.groups) {
        if (&other == &g) continue;
        for (const auto& r : other.reviews)
          for (const auto& t : r.tokens)
            if (t == token) exclusive = false;
      }
      if (exclusive) consensus.insert(token);
    }
    corpus.consensus_tokens.push_back(std::move(consensus));
  }
  for (auto& g : corpus.groups) assign_ids(g, corpus.vocab);
  return corpus;
}

TinySetup make_tiny_setup(Ablation ablation) {
  TinySetup s;
  s.group.group_id = "tiny";
  s.group.reviews = {make_review("a", "good pizza , nice sauce ."), make_review("b", "great pizza , zoomtron ."),
                     make_review("c", "nice sauce , good crust")};
  s.vocab = Vocabulary::from_tokens({"<pad>", "<s>", "</s>", "<unk>", "good", "pizza", ",", "nice", "sauce", ".",
                                     "great", "crust", "bad", "slow", "the", "was", "and", "is", "a", "very"},
                                    8);
  s.config.vocab_size = s.vocab.size();
  s.config.embed_dim = 4;
  s.config.hidden_dim = 8;
  s.config.c_dim = 6;
  s.config.z_dim = 6;
  s.config.alpha_hidden = 5;
  s.config.attention_hidden = 5;
  s.config.gate_hidden = 4;
  s.config.ablation = ablation;
  assign_ids(s.group, s.vocab);
  return s;
}

}  // namespace copycat
