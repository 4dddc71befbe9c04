// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits non-zero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "copycat/baselines.hpp"
#include "copycat/beam_search.hpp"
#include "copycat/checkpoint.hpp"
#include "copycat/cli.hpp"
#include "copycat/corpus.hpp"
#include "copycat/generate.hpp"
#include "copycat/grad_check.hpp"
#include "copycat/latent.hpp"
#include "copycat/metrics.hpp"
#include "copycat/objective.hpp"
#include "copycat/synthetic.hpp"
#include "copycat/text.hpp"

namespace {

using namespace copycat;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;
using Tokens = std::vector<std::string>;

double seconds_since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

struct Outcome {
  bool pass = true;
  std::string detail;
};

int failures = 0;

void report(int id, const std::string& name, const std::function<Outcome()>& body) {
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  if (!o.pass) ++failures;
  std::cout << (o.pass ? "PASS" : "FAIL") << " [" << id << "] " << name << ": " << o.detail << std::endl;
}

std::string fmt(double v, int precision = 3) {
  std::ostringstream s;
  s << std::setprecision(precision) << v;
  return s.str();
}

// ---- 1. gradient fidelity ----

Outcome gradient_fidelity() {
  const auto start = Clock::now();
  const TinySetup s = make_tiny_setup();
  Model model(s.config);
  model.initialize(7);
  std::mt19937_64 rng(8);
  const ElboNoise noise = ElboNoise::draw(rng, s.config, s.group.size());
  auto f = [&](nd::Tape& tape, nd::ParameterStore&) {
    Weights w = Weights::bind(tape, model);
    return elbo(w, s.group, noise, 0.7, 0.4).total;
  };
  const auto r = nd::grad_check(f, model.params());
  const double elapsed = seconds_since(start);
  std::size_t longest = 0;
  for (const auto& rev : s.group.reviews) longest = std::max(longest, rev.length());
  const bool shape_ok = s.config.hidden_dim == 8 && s.config.embed_dim == 4 && s.config.c_dim == 6 &&
                        s.config.z_dim == 6 && s.vocab.size() == 20 && s.group.size() == 3 && longest <= 6;
  return {shape_ok && r.finite && r.max_relative_error < 1e-4 && elapsed < 60.0,
          "max relative error " + fmt(r.max_relative_error) + " over " + std::to_string(r.coordinates) +
              " coordinates in " + fmt(elapsed) + " s"};
}

// ---- 2. KL oracle ----

Outcome kl_oracle() {
  std::mt19937_64 rng(2024);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_int_distribution<std::size_t> dim(1, 8);
  std::uniform_real_distribution<double> logvar(-1.0, 1.0);
  double worst = 0.0;
  for (int pair = 0; pair < 50; ++pair) {
    const std::size_t d = dim(rng);
    std::vector<double> mq(d), lq(d), mp(d), lp(d);
    for (std::size_t k = 0; k < d; ++k) {
      mq[k] = 0.5 * normal(rng);
      mp[k] = 0.5 * normal(rng);
      lq[k] = logvar(rng);
      lp[k] = logvar(rng);
    }
    const double closed = kl_divergence(mq, lq, mp, lp);
    double mc = 0.0;
    const std::size_t draws = 1000000;
    for (std::size_t n = 0; n < draws; ++n) {
      double log_ratio = 0.0;
      for (std::size_t k = 0; k < d; ++k) {
        const double x = mq[k] + std::exp(lq[k] / 2) * normal(rng);
        const double zq = (x - mq[k]) * (x - mq[k]) / std::exp(lq[k]);
        const double zp = (x - mp[k]) * (x - mp[k]) / std::exp(lp[k]);
        log_ratio += 0.5 * (lp[k] - lq[k] + zp - zq);
      }
      mc += log_ratio;
    }
    mc /= static_cast<double>(draws);
    worst = std::max(worst, std::abs(mc - closed));
  }
  return {worst < 1e-2, "max |closed form - Monte Carlo| " + fmt(worst) + " over 50 pairs"};
}

// ---- 3. beam optimality ----

struct ToyDecoder {
  std::uint64_t seed;
  std::vector<double> log_probs(const std::vector<TokenId>& prefix) const {
    std::uint64_t h = seed * 0x9E3779B97F4A7C15ull;
    for (TokenId t : prefix) h = h * 1000003u + t + 1;
    std::mt19937_64 rng(h);
    std::normal_distribution<double> normal(0.0, 1.5);
    std::vector<double> l(5);
    double z = 0.0;
    for (double& x : l) z += std::exp(x = normal(rng));
    for (double& x : l) x -= std::log(z);
    return l;
  }
};

constexpr TokenId kToyEos = 0;
constexpr TokenId kToyBos = 99;

void exhaustive(const ToyDecoder& m, std::vector<TokenId>& prefix, double lp, std::vector<TokenId>& best,
                double& best_score) {
  const auto next = m.log_probs(prefix);
  for (TokenId t = 0; t < 5; ++t) {
    prefix.push_back(t);
    const double total = lp + next[t];
    if (t == kToyEos) {
      const double score = total / static_cast<double>(prefix.size());
      if (score > best_score) {
        best_score = score;
        best = prefix;
      }
    } else if (prefix.size() < 4) {
      exhaustive(m, prefix, total, best, best_score);
    }
    prefix.pop_back();
  }
}

Outcome beam_optimality() {
  int exact = 0, greedy_ok = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const ToyDecoder m{seed};
    auto step = [&](const std::vector<TokenId>& state, TokenId input) {
      auto next = state;
      if (input != kToyBos) next.push_back(input);
      return BeamStep<std::vector<TokenId>>{next, m.log_probs(next)};
    };
    std::vector<TokenId> best, scratch;
    double best_score = -std::numeric_limits<double>::infinity();
    exhaustive(m, scratch, 0.0, best, best_score);
    if (beam_search(step, std::vector<TokenId>{}, 625, 4, kToyBos, kToyEos).tokens == best) ++exact;

    std::vector<TokenId> greedy;
    while (greedy.size() < 4) {
      const auto lp = m.log_probs(greedy);
      greedy.push_back(static_cast<TokenId>(std::max_element(lp.begin(), lp.end()) - lp.begin()));
      if (greedy.back() == kToyEos) break;
    }
    if (beam_search(step, std::vector<TokenId>{}, 1, 4, kToyBos, kToyEos).tokens == greedy) ++greedy_ok;
  }
  return {exact == 20 && greedy_ok == 20,
          "exhaustive match " + std::to_string(exact) + "/20, greedy match " + std::to_string(greedy_ok) + "/20"};
}

// ---- 4 and 5. overfit, consensus, copy ----

TrainConfig desk_config(const SyntheticCorpus& corpus, Ablation ablation, std::size_t steps) {
  TrainConfig c;
  c.model.vocab_size = corpus.vocab.size();
  c.model.embed_dim = 16;
  c.model.hidden_dim = 32;
  c.model.c_dim = 16;
  c.model.z_dim = 16;
  c.model.alpha_hidden = 16;
  c.model.attention_hidden = 16;
  c.model.gate_hidden = 8;
  c.model.ablation = ablation;
  c.learning_rate = 0.01;
  c.steps = steps;
  c.schedule.cycle_length = 200;
  c.group_size = 8;
  c.max_extended = corpus.vocab.max_extended();
  c.seed = 11;
  return c;
}

struct OverfitRun {
  bool ran = false;
  double nll_per_token = 0.0;
  double seconds = 0.0;
  std::vector<SummaryResult> summaries;
  std::string error;
};

OverfitRun& overfit() {
  static OverfitRun run = [] {
    OverfitRun r;
    try {
      const auto start = Clock::now();
      const SyntheticCorpus corpus = make_synthetic_corpus();
      const TrainConfig config = desk_config(corpus, Ablation::Full, 600);
      TrainResult trained = train(corpus.groups, corpus.vocab, config);
      double nll = 0.0;
      std::size_t tokens = 0;
      for (const auto& g : corpus.groups) {
        const LossBreakdown b =
            evaluate_group(trained.model, g, corpus.vocab, ElboNoise::zeros(config.model, g.size()));
        nll -= b.reconstruction;
        tokens += b.tokens;
      }
      r.nll_per_token = nll / static_cast<double>(tokens);
      for (const auto& g : corpus.groups) r.summaries.push_back(summarize(trained.model, corpus.vocab, g, {}));
      r.seconds = seconds_since(start);
      r.ran = true;
    } catch (const std::exception& e) {
      r.error = e.what();
    }
    return r;
  }();
  return run;
}

Outcome overfit_consensus() {
  const OverfitRun& r = overfit();
  if (!r.ran) return {false, "training failed: " + r.error};
  const SyntheticCorpus corpus = make_synthetic_corpus();
  int hits = 0;
  std::string sample;
  for (std::size_t g = 0; g < r.summaries.size(); ++g) {
    const auto& tokens = r.summaries[g].tokens;
    if (std::any_of(tokens.begin(), tokens.end(),
                    [&](const std::string& t) { return corpus.consensus_tokens[g].count(t) > 0; }))
      ++hits;
  }
  if (!r.summaries.empty()) sample = r.summaries[1].text;
  return {r.nll_per_token < 0.5 && hits >= 4 && r.seconds < 900.0,
          "NLL/token " + fmt(r.nll_per_token) + ", consensus in " + std::to_string(hits) + "/5 groups, " +
              fmt(r.seconds) + " s; e.g. \"" + sample + "\""};
}

Outcome copy_mechanism() {
  const OverfitRun& r = overfit();
  if (!r.ran) return {false, "training failed: " + r.error};
  const SyntheticCorpus corpus = make_synthetic_corpus();
  std::size_t mentions = 0;
  for (const auto& rev : corpus.groups[corpus.entity_group].reviews)
    mentions += std::count(rev.tokens.begin(), rev.tokens.end(), corpus.entity) > 0;
  const SummaryResult& s = r.summaries[corpus.entity_group];
  const bool copied = std::any_of(s.copied.begin(), s.copied.end(), [&](const CopiedToken& c) {
    return c.token == corpus.entity && c.id >= corpus.vocab.size();
  });
  return {!corpus.vocab.contains(corpus.entity) && mentions == 6 && copied,
          "entity in " + std::to_string(mentions) + "/8 reviews, " + (copied ? "copied" : "not copied") +
              " into \"" + s.text + "\""};
}

// ---- 6. ablation contracts ----

Outcome ablation_contracts() {
  const SyntheticCorpus corpus = make_synthetic_corpus();
  std::vector<std::string> notes;
  bool ok = true;

  TrainResult no_z = train(corpus.groups, corpus.vocab, desk_config(corpus, Ablation::NoZ, 30));
  const bool kl_z_zero = std::all_of(no_z.log.begin(), no_z.log.end(), [](const StepLog& l) { return l.loss.kl_z == 0.0; });
  ok &= kl_z_zero;
  notes.push_back(std::string("no_z kl_z ") + (kl_z_zero ? "== 0" : "!= 0"));

  const TrainConfig nc_config = desk_config(corpus, Ablation::NoC, 30);
  TrainResult no_c = train(corpus.groups, corpus.vocab, nc_config);
  const bool kl_c_zero = std::all_of(no_c.log.begin(), no_c.log.end(), [](const StepLog& l) { return l.loss.kl_c == 0.0; });
  // kl_z must equal the KL of each review posterior to N(0, I).
  double worst = 0.0;
  for (const auto& g0 : corpus.groups) {
    ReviewGroup g = g0;
    assign_ids(g, corpus.vocab);
    const LossBreakdown b = evaluate_group(no_c.model, g, corpus.vocab, ElboNoise::zeros(nc_config.model, g.size()));
    nd::Tape tape(false);
    Weights w = Weights::bind(tape, no_c.model);
    double expected = 0.0;
    for (const auto& rev : g.reviews) {
      const DiagGaussian q = infer_review_posterior(w, encode_review(w, rev).final_state, {});
      const auto m = q.mean.value().to_vector(), lv = q.log_variance.value().to_vector();
      for (std::size_t k = 0; k < m.size(); ++k) expected += 0.5 * (std::exp(lv[k]) + m[k] * m[k] - 1.0 - lv[k]);
    }
    worst = std::max(worst, std::abs(b.kl_z - expected));
  }
  const bool standard_prior = worst < 1e-9 && !no_c.model.params().contains("z_prior_mean.weight");
  ok &= kl_c_zero && standard_prior;
  notes.push_back(std::string("no_c kl_c ") + (kl_c_zero ? "== 0" : "!= 0") + ", prior N(0,I) gap " + fmt(worst));

  TrainResult no_att = train(corpus.groups, corpus.vocab, desk_config(corpus, Ablation::NoAttention, 30));
  std::size_t extended = 0;
  for (const auto& g : corpus.groups) {
    SummarizeOptions o;
    o.max_len = 20;
    for (TokenId id : summarize(no_att.model, corpus.vocab, g, o).ids) extended += id >= corpus.vocab.size();
  }
  ok &= extended == 0;
  notes.push_back("no_attention extended ids " + std::to_string(extended));

  std::string detail;
  for (const auto& n : notes) detail += (detail.empty() ? "" : "; ") + n;
  return {ok, detail};
}

// ---- 7. annealing ----

Outcome annealing() {
  const AnnealSchedule s{1000, 0.8, 1.0, 0.3};
  struct Case {
    std::size_t step;
    double frac;
  };
  const std::vector<Case> cases = {{0, 0.0}, {400, 0.5}, {800, 1.0}, {999, 1.0}, {1000, 0.0}, {1800, 1.0}};
  int ok = 0;
  for (const auto& c : cases) {
    const Betas b = anneal_beta(c.step, s);
    ok += b.z == 1.0 * c.frac && b.c == 0.3 * c.frac;
  }
  return {ok == 6, std::to_string(ok) + "/6 steps match the closed form (L = 1000)"};
}

// ---- 8. ROUGE fixtures ----

Outcome rouge_fixtures() {
  struct Fixture {
    std::string candidate;
    std::vector<std::string> references;
    char kind;  // '1', '2' or 'L'
    double f1;
  };
  const std::vector<Fixture> fixtures = {
      {"the cat sat", {"the cat ran"}, '1', 2.0 / 3},
      {"a a a", {"a"}, '1', 0.5},
      {"a b c d", {"a c b d"}, 'L', 0.75},
      {"the cat sat", {"the cat ran"}, '2', 0.5},
      {"a b", {"c d"}, '1', 0.0},
      {"a b", {"c d"}, 'L', 0.0},
      {"x y z", {"x y z"}, '2', 1.0},
      {"a", {"a"}, '2', 0.0},
      {"a b", {"x a y b z"}, 'L', 2 * 1.0 * 0.4 / 1.4},
      {"the cat ran", {"the cat sat", "a dog ran"}, '1', (2.0 / 3 + 1.0 / 3) / 2},
      {"a b a b", {"a b", "b a b a"}, '2', (0.5 + 2.0 / 3) / 2},
      {"a b c", {"c b a", "a b c"}, 'L', (1.0 / 3 + 1.0) / 2},
  };
  int ok = 0;
  for (const auto& f : fixtures) {
    const Tokens cand = tokenize(f.candidate);
    std::vector<Tokens> refs;
    for (const auto& r : f.references) refs.push_back(tokenize(r));
    const double got = f.kind == 'L' ? mean_rouge_l_f1(cand, refs) : mean_rouge_n_f1(cand, refs, f.kind - '0');
    ok += std::abs(got - f.f1) < 1e-9;
    if (std::abs(got - f.f1) >= 1e-9) std::fprintf(stderr, "rouge-%c \"%s\": got %.6f want %.6f\n", f.kind, f.candidate.c_str(), got, f.f1);
  }
  std::mt19937_64 rng(8);
  std::uniform_int_distribution<std::size_t> len(1, 30), sym(0, 6);
  int self = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    Tokens x(len(rng));
    for (auto& t : x) t = std::string(1, static_cast<char>('a' + sym(rng)));
    self += rouge_l(x, x).f1 == 1.0;
  }
  return {ok == 12 && self == 1000,
          std::to_string(ok) + "/12 fixtures, rouge_l(x,x)=1 on " + std::to_string(self) + "/1000 lists"};
}

// ---- 9. baseline oracles ----

double lcs_f1(const Tokens& a, const Tokens& b) {
  std::vector<std::vector<std::size_t>> t(a.size() + 1, std::vector<std::size_t>(b.size() + 1, 0));
  for (std::size_t i = 1; i <= a.size(); ++i)
    for (std::size_t j = 1; j <= b.size(); ++j)
      t[i][j] = a[i - 1] == b[j - 1] ? t[i - 1][j - 1] + 1 : std::max(t[i - 1][j], t[i][j - 1]);
  const double l = static_cast<double>(t[a.size()][b.size()]);
  return l == 0 ? 0.0 : 2 * l / static_cast<double>(a.size() + b.size());
}

std::size_t rescore(const ReviewGroup& g, const std::vector<Tokens>& targets, bool skip_self) {
  std::size_t best = 0;
  double best_score = -1.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    double s = 0.0;
    std::size_t n = 0;
    for (std::size_t j = 0; j < targets.size(); ++j) {
      if (skip_self && i == j) continue;
      s += lcs_f1(g.reviews[i].tokens, targets[j]);
      ++n;
    }
    if (s / n > best_score + 1e-12) {
      best_score = s / n;
      best = i;
    }
  }
  return best;
}

std::vector<double> power_iteration(const std::vector<std::vector<double>>& sim, double d) {
  const std::size_t n = sim.size();
  std::vector<double> p(n, 1.0 / n);
  for (int it = 0; it < 100000; ++it) {
    std::vector<double> next(n, (1.0 - d) / n);
    for (std::size_t i = 0; i < n; ++i) {
      double row = 0.0;
      for (std::size_t j = 0; j < n; ++j) row += sim[i][j];
      for (std::size_t j = 0; j < n; ++j) next[j] += d * p[i] * (row > 0 ? sim[i][j] / row : 1.0 / n);
    }
    double change = 0.0;
    for (std::size_t i = 0; i < n; ++i) change += std::abs(next[i] - p[i]);
    p = next;
    if (change < 1e-14) break;
  }
  return p;
}

Outcome baseline_oracles() {
  std::mt19937_64 rng(9);
  const Tokens words = {"good", "food", "slow", "service", "nice", "staff", "pizza", "cold"};
  std::uniform_int_distribution<std::size_t> len(2, 8), pick(0, words.size() - 1), size(2, 6);
  auto text = [&] {
    std::string s;
    for (std::size_t k = len(rng); k > 0; --k) s += words[pick(rng)] + " ";
    return s;
  };
  int clustroid_ok = 0, oracle_ok = 0;
  for (int trial = 0; trial < 25; ++trial) {
    ReviewGroup g;
    for (std::size_t i = size(rng); i > 0; --i) g.reviews.push_back(make_review("r", text()));
    std::vector<Tokens> selves;
    for (const auto& r : g.reviews) selves.push_back(r.tokens);
    clustroid_ok += clustroid_index(g) == rescore(g, selves, true);
    const std::vector<std::string> refs = {text(), text()};
    oracle_ok += oracle_index(g, refs) == rescore(g, {tokenize(refs[0]), tokenize(refs[1])}, false);
  }
  int lex_ok = 0;
  double worst = 0.0;
  for (int trial = 0; trial < 25; ++trial) {
    std::vector<std::string> sentences;
    for (std::size_t i = size(rng) + 1; i > 0; --i) sentences.push_back(text());
    const SentenceGraph graph = build_sentence_graph(sentences);
    const auto ref = power_iteration(graph.similarity, 0.85);
    double l1 = 0.0;
    for (std::size_t i = 0; i < ref.size(); ++i) l1 += std::abs(ref[i] - graph.centrality[i]);
    worst = std::max(worst, l1);
    lex_ok += l1 < 1e-8;
  }
  return {clustroid_ok == 25 && oracle_ok == 25 && lex_ok == 25,
          "clustroid " + std::to_string(clustroid_ok) + "/25, oracle " + std::to_string(oracle_ok) +
              "/25, LexRank " + std::to_string(lex_ok) + "/25 (max L1 " + fmt(worst) + ")"};
}

// ---- 10. determinism through the command line ----

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

Outcome determinism() {
  const fs::path dir = fs::temp_directory_path() / "copycat_acceptance_determinism";
  fs::remove_all(dir);
  fs::create_directories(dir);
  {
    std::ofstream groups(dir / "groups.jsonl");
    write_groups_jsonl(groups, make_synthetic_corpus().groups);
    std::ofstream cfg(dir / "config.txt");
    cfg << "embed_dim = 8\nhidden_dim = 12\nc_dim = 8\nz_dim = 8\nalpha_hidden = 6\nattention_hidden = 6\n"
           "gate_hidden = 4\nsteps = 15\nlearning_rate = 0.01\nseed = 21\n";
  }
  std::ostringstream sink;
  auto cli = [&](std::vector<std::string> args) {
    args.insert(args.begin(), "copycat");
    return run_cli(args, sink, sink);
  };
  auto p = [&](const char* name) { return (dir / name).string(); };
  int codes = 0;
  for (const char* out : {"run_a", "run_b"})
    codes += cli({"train", "--config", p("config.txt"), "--data", p("groups.jsonl"), "--out", p(out)});
  for (const char* out : {"a.jsonl", "b.jsonl"})
    codes += cli({"summarize", "--model", p("run_a/model.ckpt"), "--input", p("groups.jsonl"), "--out", p(out)});
  const bool same_ckpt = slurp(dir / "run_a/model.ckpt") == slurp(dir / "run_b/model.ckpt");
  const bool same_summary = slurp(dir / "a.jsonl") == slurp(dir / "b.jsonl") && !slurp(dir / "a.jsonl").empty();
  fs::remove_all(dir);
  return {codes == 0 && same_ckpt && same_summary,
          std::string("checkpoints ") + (same_ckpt ? "identical" : "differ") + ", summaries " +
              (same_summary ? "identical" : "differ")};
}

// ---- 11. BWS ----

Outcome bws() {
  const std::vector<BwsJudgment> extremes = {{"1", {"copycat", "lead", "random"}, "copycat", "random"},
                                             {"2", {"copycat", "random", "clustroid"}, "copycat", "random"},
                                             {"3", {"copycat", "lead", "random"}, "copycat", "random"}};
  const auto e = bws_scores(extremes);
  std::vector<BwsJudgment> counted;
  for (int i = 0; i < 10; ++i)
    counted.push_back({std::to_string(i), {"a", "b", "c"}, i < 3 ? "a" : "b", i == 3 ? "a" : "c"});
  const auto c = bws_scores(counted);
  const bool ok = e.at("copycat") == 1.0 && e.at("random") == -1.0 && e.at("lead") == 0.0 &&
                  e.at("clustroid") == 0.0 && std::abs(c.at("a") - 0.2) < 1e-15 &&
                  std::abs(c.at("b") - 0.7) < 1e-15 && std::abs(c.at("c") + 0.9) < 1e-15;
  return {ok, "extremes +1/-1 and hand counts 0.2/0.7/-0.9 " + std::string(ok ? "reproduced" : "not reproduced")};
}

}  // namespace

int main() {
  setenv("COPYCAT_LOG", "quiet", 1);
  report(1, "gradient fidelity", gradient_fidelity);
  report(2, "KL oracle", kl_oracle);
  report(3, "beam optimality", beam_optimality);
  report(4, "overfit and consensus", overfit_consensus);
  report(5, "copy mechanism", copy_mechanism);
  report(6, "ablation contracts", ablation_contracts);
  report(7, "annealing", annealing);
  report(8, "ROUGE fixtures", rouge_fixtures);
  report(9, "baseline oracles", baseline_oracles);
  report(10, "determinism", determinism);
  report(11, "BWS aggregation", bws);
  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed") << std::endl;
  return failures == 0 ? 0 : 1;
}
