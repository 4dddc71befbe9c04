#include <gtest/gtest.h>

#include <sstream>
#include <string>

#include "copycat/checkpoint.hpp"
#include "copycat/config.hpp"
#include "copycat/generate.hpp"
#include "copycat/synthetic.hpp"

namespace copycat {
namespace {

TrainConfig config_for(const TinySetup& s) {
  TrainConfig c;
  c.model = s.config;
  c.group_size = 3;
  c.steps = 3;
  c.learning_rate = 0.02;
  c.max_extended = 8;
  c.seed = 9;
  return c;
}

std::string serialize(const Model& m, const TrainConfig& c, const Vocabulary& v, std::size_t step) {
  std::ostringstream out;
  save_checkpoint(out, m, c, v, step);
  return out.str();
}

TEST(Checkpoint, RoundTripRestoresEverything) {
  const TinySetup s = make_tiny_setup(Ablation::NoC);
  TrainConfig c = config_for(s);
  Model m(s.config);
  m.initialize(4);
  std::istringstream in(serialize(m, c, s.vocab, 17));
  const Checkpoint back = load_checkpoint(in);
  EXPECT_EQ(back.step, 17u);
  EXPECT_EQ(back.vocab.tokens(), s.vocab.tokens());
  EXPECT_EQ(back.vocab.max_extended(), 8u);
  EXPECT_EQ(to_json(back.config), to_json(c));
  EXPECT_EQ(back.model.config().ablation, Ablation::NoC);
  EXPECT_TRUE(back.model.params().identical_to(m.params()));
}

TEST(Checkpoint, RejectsWrongMagicVersionOrTruncation) {
  const TinySetup s = make_tiny_setup();
  Model m(s.config);
  m.initialize(1);
  const std::string bytes = serialize(m, config_for(s), s.vocab, 0);

  std::string magic = bytes;
  magic[0] = 'X';
  std::istringstream a(magic);
  EXPECT_THROW(load_checkpoint(a), std::runtime_error);

  std::string version = bytes;
  version[4] = static_cast<char>(Checkpoint::kVersion + 1);
  std::istringstream b(version);
  EXPECT_THROW(load_checkpoint(b), std::runtime_error);

  std::istringstream c(bytes.substr(0, bytes.size() / 2));
  EXPECT_THROW(load_checkpoint(c), std::runtime_error);
}

TEST(Checkpoint, SameSeedGivesBitIdenticalFilesAndSummaries) {
  const TinySetup s = make_tiny_setup();
  const TrainConfig c = config_for(s);
  const TrainResult a = train({s.group}, s.vocab, c), b = train({s.group}, s.vocab, c);
  const std::string fa = serialize(a.model, c, s.vocab, c.steps), fb = serialize(b.model, c, s.vocab, c.steps);
  EXPECT_EQ(fa, fb);

  std::istringstream ia(fa), ib(fb);
  Checkpoint ca = load_checkpoint(ia), cb = load_checkpoint(ib);
  SummarizeOptions o;
  o.max_len = 8;
  const SummaryResult x = summarize(ca.model, ca.vocab, s.group, o), y = summarize(cb.model, cb.vocab, s.group, o);
  EXPECT_EQ(x.ids, y.ids);
  EXPECT_EQ(x.log_prob, y.log_prob);
}

TEST(Checkpoint, FileHelpersReportMissingFiles) {
  EXPECT_THROW(load_checkpoint_file("/nonexistent/model.ckpt"), std::runtime_error);
}

}  // namespace
}  // namespace copycat
