#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "copycat/baselines.hpp"
#include "copycat/generate.hpp"
#include "copycat/grad_check.hpp"
#include "copycat/metrics.hpp"
#include "copycat/objective.hpp"
#include "copycat/synthetic.hpp"
#include "copycat/text.hpp"

namespace py = pybind11;
using namespace copycat;

namespace {

ReviewGroup group_from_texts(const std::vector<std::string>& texts, const std::string& group_id) {
  ReviewGroup g;
  g.group_id = group_id;
  for (std::size_t i = 0; i < texts.size(); ++i) g.reviews.push_back(make_review(std::to_string(i), texts[i]));
  return g;
}

py::dict rouge_dict(const RougeScore& s) {
  py::dict d;
  d["precision"] = s.precision;
  d["recall"] = s.recall;
  d["f1"] = s.f1;
  return d;
}

std::vector<BwsJudgment> judgments_from(const std::vector<py::dict>& rows) {
  std::vector<BwsJudgment> out;
  for (const auto& r : rows) {
    BwsJudgment j;
    j.item_id = r.contains("item_id") ? r["item_id"].cast<std::string>() : std::string();
    j.systems = r["systems"].cast<std::vector<std::string>>();
    j.best = r["best"].cast<std::string>();
    j.worst = r["worst"].cast<std::string>();
    out.push_back(std::move(j));
  }
  return out;
}

// Trains on the built-in synthetic corpus and decodes every group.
py::dict train_synthetic(std::size_t steps, std::uint64_t seed, const std::string& variant, std::size_t dim,
                         double learning_rate, std::size_t beam_width) {
  SyntheticCorpus corpus = make_synthetic_corpus();
  TrainConfig config;
  config.model.vocab_size = corpus.vocab.size();
  config.model.embed_dim = dim;
  config.model.hidden_dim = 2 * dim;
  config.model.c_dim = dim;
  config.model.z_dim = dim;
  config.model.alpha_hidden = dim;
  config.model.attention_hidden = dim;
  config.model.gate_hidden = std::max<std::size_t>(1, dim / 2);
  config.learning_rate = learning_rate;
  config.steps = steps;
  config.seed = seed;
  config = apply_ablation(config, variant);
  config.validate();

  std::vector<double> losses;
  TrainHooks hooks;
  hooks.on_step = [&](const StepLog& log) { losses.push_back(log.loss.total); };
  TrainResult result = [&] {
    py::gil_scoped_release release;
    return train(corpus.groups, corpus.vocab, config, hooks);
  }();

  SummarizeOptions options;
  options.beam_width = beam_width;
  py::list summaries;
  for (const auto& g : corpus.groups) {
    const SummaryResult s = summarize(result.model, corpus.vocab, g, options);
    py::dict d;
    d["group_id"] = s.group_id;
    d["text"] = s.text;
    d["tokens"] = s.tokens;
    d["log_prob"] = s.log_prob;
    d["finished"] = s.finished;
    std::vector<std::string> copied;
    for (const auto& c : s.copied) copied.push_back(c.token);
    d["copied"] = copied;
    summaries.append(d);
  }
  py::dict out;
  out["losses"] = losses;
  out["summaries"] = summaries;
  out["entity"] = corpus.entity;
  return out;
}

py::dict grad_check_tiny(const std::string& variant, std::uint64_t seed) {
  TinySetup s = make_tiny_setup(parse_ablation(variant));
  Model model(s.config);
  model.initialize(seed);
  std::mt19937_64 rng(seed + 1);
  const ElboNoise noise = ElboNoise::draw(rng, s.config, s.group.size());
  nd::GradCheckReport r;
  {
    py::gil_scoped_release release;
    r = nd::grad_check(
        [&](nd::Tape& t, nd::ParameterStore&) {
          Weights w = Weights::bind(t, model);
          return elbo(w, s.group, noise, 0.7, 0.4).total;
        },
        model.params());
  }
  py::dict d;
  d["max_relative_error"] = r.max_relative_error;
  d["worst_parameter"] = r.worst_parameter;
  d["worst_index"] = r.worst_index;
  d["coordinates"] = r.coordinates;
  d["finite"] = r.finite;
  return d;
}

}  // namespace

PYBIND11_MODULE(copycat, m) {
  m.doc() = "Opinion summarization with a hierarchical VAE and a pointer-generator decoder";

  m.def("tokenize", &tokenize, py::arg("text"));
  m.def("detokenize", &detokenize, py::arg("tokens"));
  m.def("normalize", &normalize, py::arg("text"));
  m.def("split_sentences", &split_sentences, py::arg("text"));

  m.def(
      "rouge_n",
      [](const std::vector<std::string>& cand, const std::vector<std::string>& ref, std::size_t n) {
        return rouge_dict(rouge_n(cand, ref, n));
      },
      py::arg("candidate"), py::arg("reference"), py::arg("n"));
  m.def(
      "rouge_l",
      [](const std::vector<std::string>& cand, const std::vector<std::string>& ref) {
        return rouge_dict(rouge_l(cand, ref));
      },
      py::arg("candidate"), py::arg("reference"));
  m.def(
      "score_text",
      [](const std::string& cand, const std::vector<std::string>& refs) {
        const RougeTriple t = score_text(cand, refs);
        return std::map<std::string, double>{{"r1", t.r1}, {"r2", t.r2}, {"rl", t.rl}};
      },
      py::arg("candidate"), py::arg("references"));

  m.def(
      "bws_scores", [](const std::vector<py::dict>& rows) { return bws_scores(judgments_from(rows)); },
      py::arg("judgments"));
  m.def(
      "content_support",
      [](const std::vector<std::string>& labels) {
        std::vector<SupportLabel> parsed;
        for (const auto& l : labels) parsed.push_back(parse_support_label(l));
        const SupportPercentages p = content_support_aggregate(parsed);
        return std::map<std::string, double>{{"full", p.full}, {"partial", p.partial}, {"no", p.no}};
      },
      py::arg("labels"));

  m.def(
      "clustroid", [](const std::vector<std::string>& reviews) { return clustroid_index(group_from_texts(reviews, "g")); },
      py::arg("reviews"));
  m.def(
      "oracle",
      [](const std::vector<std::string>& reviews, const std::vector<std::string>& references) {
        return oracle_index(group_from_texts(reviews, "g"), references);
      },
      py::arg("reviews"), py::arg("references"));
  m.def(
      "lead", [](const std::vector<std::string>& reviews) { return lead(group_from_texts(reviews, "g")); },
      py::arg("reviews"));
  m.def(
      "random_review",
      [](const std::vector<std::string>& reviews, std::uint64_t seed) {
        return random_review_index(group_from_texts(reviews, "g"), seed);
      },
      py::arg("reviews"), py::arg("seed"));
  m.def(
      "lexrank",
      [](const std::vector<std::string>& reviews, std::optional<std::size_t> budget) {
        LexRankOptions o;
        o.budget_tokens = budget;
        return lexrank(group_from_texts(reviews, "g"), o);
      },
      py::arg("reviews"), py::arg("budget_tokens") = py::none());

  m.def("train_synthetic", &train_synthetic, py::arg("steps") = 100, py::arg("seed") = 1,
        py::arg("variant") = "full", py::arg("dim") = 8, py::arg("learning_rate") = 0.01,
        py::arg("beam_width") = 3);
  m.def("grad_check_tiny", &grad_check_tiny, py::arg("variant") = "full", py::arg("seed") = 0);
}
