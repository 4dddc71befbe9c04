#include "copycat/generate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <random>
#include <stdexcept>

#include "copycat/beam_search.hpp"
#include "copycat/decoder.hpp"
#include "copycat/encoder.hpp"
#include "copycat/latent.hpp"
#include "copycat/text.hpp"

namespace copycat {

namespace {

struct PlainState {
  nd::Tensor hidden;
  nd::Tensor context;
};

// Values shared by every decoding step once the group has been encoded.
struct FrozenSource {
  nd::Tensor code;
  nd::Tensor states;
  nd::Tensor keys;
  std::vector<TokenId> ids;
  std::vector<std::pair<std::size_t, std::size_t>> origin;
  bool present = false;
};

TokenId feed_back(TokenId id, std::size_t vocab_size) { return id < vocab_size ? id : kUnk; }

nd::Tensor draw_normal(std::mt19937_64& rng, std::size_t n) {
  std::normal_distribution<double> normal(0.0, 1.0);
  nd::Tensor t(n);
  for (std::size_t i = 0; i < n; ++i) t[i] = normal(rng);
  return t;
}

nd::Tensor sample(std::mt19937_64& rng, const DiagGaussian& g) {
  nd::Var noise = g.mean.tape().constant(draw_normal(rng, g.dim()));
  return reparameterize(g, noise).value();
}

// Runs one decoder step on a scratch tape so memory stays bounded by a
// single step regardless of beam width and length.
class StepRunner {
 public:
  StepRunner(Model& model, const FrozenSource& source, std::size_t extended_size)
      : model_(model), source_(source), extended_size_(extended_size) {}

  template <typename Fn>
  auto run(const PlainState& state, TokenId input, Fn&& inspect) const {
    nd::Tape tape(false);
    Weights w = Weights::bind(tape, model_);
    DecoderState s{tape.reference(state.hidden), tape.reference(state.context), tape.reference(source_.code)};
    std::optional<CopySource> src;
    if (source_.present) {
      src.emplace();
      src->states = tape.reference(source_.states);
      src->keys = tape.reference(source_.keys);
      src->ids = source_.ids;
      src->origin = source_.origin;
    }
    StepResult r = decoder_step(w, s, feed_back(input, model_.config().vocab_size), src ? &*src : nullptr,
                                extended_size_);
    return inspect(r);
  }

 private:
  Model& model_;
  const FrozenSource& source_;
  std::size_t extended_size_;
};

}  // namespace

SummaryResult summarize(Model& model, const Vocabulary& vocab, ReviewGroup group, const SummarizeOptions& options) {
  const ModelConfig& cfg = model.config();
  if (group.reviews.empty()) throw std::invalid_argument("summarize: empty group");
  if (vocab.size() != cfg.vocab_size) throw std::invalid_argument("summarize: vocabulary does not match model");
  assign_ids(group, vocab);
  const std::size_t extended_size = cfg.vocab_size + group.oov.size();
  std::mt19937_64 rng(options.seed);
  const bool sampling = options.mode == GenerationMode::Sample;

  FrozenSource frozen;
  {
    nd::Tape tape(false);
    Weights w = Weights::bind(tape, model);
    std::vector<EncodedReview> encoded;
    encoded.reserve(group.size());
    for (const auto& r : group.reviews) encoded.push_back(encode_review(w, r));

    nd::Var c;
    if (cfg.uses_c()) {
      DiagGaussian q_c = infer_group_posterior(w, encoded).first;
      c = sampling ? tape.constant(sample(rng, q_c)) : q_c.mean;
    }
    nd::Tensor code;
    if (cfg.uses_z()) {
      if (cfg.uses_c()) {
        DiagGaussian p_z = prior_z_given_c(w, c);
        code = sampling ? sample(rng, p_z) : p_z.mean.value();
      } else {
        // Without c the prior on z is N(0, I).
        code = sampling ? draw_normal(rng, cfg.z_dim) : nd::Tensor(cfg.z_dim);
      }
    } else {
      code = c.value();
    }
    frozen.code = std::move(code);

    if (cfg.uses_attention()) {
      auto keys = attention_keys(w, encoded);
      CopySource src = make_copy_source(encoded, keys, std::nullopt);
      frozen.states = src.states.value();
      frozen.keys = src.keys.value();
      frozen.ids = std::move(src.ids);
      frozen.origin = std::move(src.origin);
      frozen.present = true;
    }
  }

  StepRunner runner(model, frozen, extended_size);
  PlainState initial;
  {
    nd::Tape tape(false);
    Weights w = Weights::bind(tape, model);
    DecoderState s = initial_state(w, tape.reference(frozen.code));
    initial = {s.hidden.value(), s.context.value()};
  }

  auto step = [&](const PlainState& state, TokenId input) {
    return runner.run(state, input, [](const StepResult& r) {
      BeamStep<PlainState> out{{r.state.hidden.value(), r.state.context.value()}, {}};
      const nd::Tensor& p = r.output.distribution.value();
      out.log_probs.resize(p.size());
      for (std::size_t i = 0; i < p.size(); ++i)
        out.log_probs[i] = p[i] > 0.0 ? std::log(p[i]) : -std::numeric_limits<double>::infinity();
      return out;
    });
  };
  BeamHypothesis best = beam_search(step, initial, options.beam_width, options.max_len, kBos, kEos);

  SummaryResult result;
  result.group_id = group.group_id;
  result.mode = options.mode;
  result.log_prob = best.log_prob;
  result.finished = best.finished;
  result.ids = best.tokens;
  if (best.finished) result.ids.pop_back();
  for (TokenId id : result.ids)
    result.tokens.push_back(id < cfg.vocab_size ? vocab.token(id) : group.oov.at(id - cfg.vocab_size));
  result.text = detokenize(result.tokens);

  // Provenance: replay the chosen sequence and mark tokens whose copy mass
  // exceeds their generation mass.
  if (frozen.present) {
    PlainState state = initial;
    TokenId input = kBos;
    for (std::size_t t = 0; t < result.ids.size(); ++t) {
      const TokenId id = result.ids[t];
      state = runner.run(state, input, [&](const StepResult& r) {
        const double p_gen = r.p_gen.scalar();
        const double generated = id < cfg.vocab_size ? p_gen * r.output.p_vocab.value()[id] : 0.0;
        const double copied = (1.0 - p_gen) * r.output.p_copy.value()[id];
        if (copied > generated) {
          const nd::Tensor& att = r.attention.value();
          std::size_t best_pos = frozen.ids.size();
          for (std::size_t j = 0; j < frozen.ids.size(); ++j) {
            if (frozen.ids[j] != id) continue;
            if (best_pos == frozen.ids.size() || att[j] > att[best_pos]) best_pos = j;
          }
          CopiedToken ct;
          ct.output_position = t;
          ct.token = result.tokens[t];
          ct.id = id;
          if (best_pos < frozen.ids.size()) std::tie(ct.review, ct.position) = frozen.origin[best_pos];
          result.copied.push_back(std::move(ct));
        }
        return PlainState{r.state.hidden.value(), r.state.context.value()};
      });
      input = id;
    }
  }
  return result;
}

CopyStatistics copy_statistics(std::span<const SummaryResult> summaries) {
  if (summaries.empty()) throw std::invalid_argument("copy_statistics: no summaries");
  std::map<std::string, std::size_t> counts;
  std::size_t total = 0;
  for (const auto& s : summaries) {
    total += s.copied.size();
    for (const auto& c : s.copied) ++counts[c.token];
  }
  CopyStatistics stats;
  stats.mean_copied_per_summary = static_cast<double>(total) / static_cast<double>(summaries.size());
  stats.frequency.assign(counts.begin(), counts.end());
  std::stable_sort(stats.frequency.begin(), stats.frequency.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  return stats;
}

}  // namespace copycat
