#include "copycat/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "copycat/text.hpp"

namespace copycat {

Review make_review(std::string review_id, std::string text) {
  Review r;
  r.review_id = std::move(review_id);
  r.tokens = tokenize(text);
  r.surface_text = std::move(text);
  return r;
}

// ---- Vocabulary ---------------------------------------------------------------

const std::vector<std::string>& Vocabulary::specials() {
  static const std::vector<std::string> kSpecials = {"<pad>", "<s>", "</s>", "<unk>"};
  return kSpecials;
}

Vocabulary::Vocabulary() : tokens_(specials()) {
  for (TokenId i = 0; i < tokens_.size(); ++i) index_.emplace(tokens_[i], i);
}

Vocabulary Vocabulary::from_tokens(std::vector<std::string> tokens, std::size_t max_extended) {
  const auto& sp = specials();
  if (tokens.size() < sp.size() || !std::equal(sp.begin(), sp.end(), tokens.begin()))
    throw std::invalid_argument("vocabulary must start with the special tokens");
  Vocabulary v;
  v.tokens_ = std::move(tokens);
  v.max_extended_ = max_extended;
  v.index_.clear();
  v.index_.reserve(v.tokens_.size());
  for (TokenId i = 0; i < v.tokens_.size(); ++i) {
    if (!v.index_.emplace(v.tokens_[i], i).second)
      throw std::invalid_argument("duplicate vocabulary token: " + v.tokens_[i]);
  }
  return v;
}

bool Vocabulary::contains(std::string_view token) const { return index_.contains(std::string(token)); }

TokenId Vocabulary::id(std::string_view token) const {
  auto it = index_.find(std::string(token));
  return it == index_.end() ? kUnk : it->second;
}

const std::string& Vocabulary::token(TokenId id) const {
  if (id >= tokens_.size()) throw std::out_of_range("token id outside the fixed vocabulary");
  return tokens_[id];
}

void Vocabulary::save(std::ostream& out) const {
  for (const auto& t : tokens_) out << t << '\n';
}

Vocabulary Vocabulary::load(std::istream& in, std::size_t max_extended) {
  std::vector<std::string> tokens;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    tokens.push_back(line);
  }
  return from_tokens(std::move(tokens), max_extended);
}

namespace {

Vocabulary vocabulary_from_counts(const std::unordered_map<std::string, std::size_t>& counts,
                                  std::size_t size, std::size_t max_extended) {
  if (size < kSpecialCount) throw std::invalid_argument("vocabulary size must be at least 4");
  if (counts.empty()) throw std::invalid_argument("cannot build a vocabulary from an empty corpus");
  std::vector<std::pair<std::string, std::size_t>> ranked(counts.begin(), counts.end());
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    return a.second != b.second ? a.second > b.second : a.first < b.first;
  });
  std::vector<std::string> tokens = Vocabulary::specials();
  for (const auto& [tok, n] : ranked) {
    if (tokens.size() >= size) break;
    if (std::find(tokens.begin(), tokens.begin() + kSpecialCount, tok) != tokens.begin() + kSpecialCount)
      continue;
    tokens.push_back(tok);
  }
  return Vocabulary::from_tokens(std::move(tokens), max_extended);
}

}  // namespace

Vocabulary build_vocabulary(std::span<const Review> reviews, std::size_t size, std::size_t max_extended) {
  std::unordered_map<std::string, std::size_t> counts;
  for (const auto& r : reviews)
    for (const auto& t : r.tokens) ++counts[t];
  return vocabulary_from_counts(counts, size, max_extended);
}

Vocabulary build_vocabulary(std::span<const ReviewGroup> groups, std::size_t size, std::size_t max_extended) {
  std::unordered_map<std::string, std::size_t> counts;
  for (const auto& g : groups)
    for (const auto& r : g.reviews)
      for (const auto& t : r.tokens) ++counts[t];
  return vocabulary_from_counts(counts, size, max_extended);
}

void assign_ids(ReviewGroup& group, const Vocabulary& vocab) {
  group.oov.clear();
  std::unordered_map<std::string, TokenId> local;
  const std::size_t v = vocab.size();
  for (auto& r : group.reviews) {
    r.token_ids.assign(r.tokens.size(), kUnk);
    r.extended_ids.assign(r.tokens.size(), kUnk);
    for (std::size_t t = 0; t < r.tokens.size(); ++t) {
      const std::string& tok = r.tokens[t];
      const TokenId id = vocab.id(tok);
      r.token_ids[t] = id;
      if (id != kUnk || vocab.contains(tok)) {
        r.extended_ids[t] = id;
        continue;
      }
      if (auto it = local.find(tok); it != local.end()) {
        r.extended_ids[t] = it->second;
      } else if (group.oov.size() < vocab.max_extended()) {
        const TokenId ext = v + group.oov.size();
        local.emplace(tok, ext);
        group.oov.push_back(tok);
        r.extended_ids[t] = ext;
      }
    }
  }
}

// ---- filtering ----------------------------------------------------------------

std::size_t nearest_rank_percentile(std::vector<std::size_t> values, double pct) {
  if (values.empty()) throw std::invalid_argument("percentile of an empty set");
  if (!(pct > 0.0 && pct <= 100.0)) throw std::invalid_argument("percentile must lie in (0, 100]");
  std::sort(values.begin(), values.end());
  const double n = static_cast<double>(values.size());
  // Guards against 90/100*10 evaluating to 9.000000000000002.
  auto rank = static_cast<std::size_t>(std::ceil(pct * n / 100.0 - 1e-9));
  rank = std::clamp<std::size_t>(rank, 1, values.size());
  return values[rank - 1];
}

std::vector<ReviewGroup> filter_groups(std::vector<ReviewGroup> groups, const FilterOptions& options) {
  if (options.min_len == 0 || options.min_len > options.max_len)
    throw std::invalid_argument("filter_groups: require 0 < min_len <= max_len");
  if (!(options.popularity_pct > 0.0 && options.popularity_pct <= 100.0))
    throw std::invalid_argument("filter_groups: popularity_pct must lie in (0, 100]");

  std::vector<ReviewGroup> kept;
  for (auto& g : groups) {
    std::erase_if(g.reviews, [&](const Review& r) {
      return r.length() < options.min_len || r.length() > options.max_len;
    });
    if (g.reviews.size() >= options.min_reviews) kept.push_back(std::move(g));
  }
  if (kept.empty()) return kept;

  std::vector<std::size_t> counts;
  counts.reserve(kept.size());
  for (const auto& g : kept) counts.push_back(g.reviews.size());
  const std::size_t cap = nearest_rank_percentile(counts, options.popularity_pct);
  std::erase_if(kept, [cap](const ReviewGroup& g) { return g.reviews.size() > cap; });
  return kept;
}

// ---- batching -----------------------------------------------------------------

BatchStream::BatchStream(std::vector<ReviewGroup> groups, const Vocabulary& vocab, std::size_t group_size,
                         std::size_t groups_per_batch, std::uint64_t seed)
    : groups_(std::move(groups)),
      vocab_(&vocab),
      group_size_(group_size),
      groups_per_batch_(groups_per_batch),
      rng_(seed) {
  if (groups_.empty()) throw std::invalid_argument("BatchStream: no groups");
  if (group_size_ == 0 || groups_per_batch_ == 0)
    throw std::invalid_argument("BatchStream: group size and groups per batch must be positive");
  for (const auto& g : groups_) {
    if (g.reviews.size() < group_size_)
      throw std::invalid_argument("BatchStream: group " + g.group_id + " has " +
                                  std::to_string(g.reviews.size()) + " reviews, fewer than " +
                                  std::to_string(group_size_));
  }
  reshuffle();
}

void BatchStream::reshuffle() {
  order_.resize(groups_.size());
  for (std::size_t i = 0; i < order_.size(); ++i) order_[i] = i;
  std::shuffle(order_.begin(), order_.end(), rng_);
  cursor_ = 0;
}

Batch BatchStream::next() {
  Batch batch;
  for (std::size_t k = 0; k < groups_per_batch_; ++k) {
    if (cursor_ == order_.size()) {
      ++epoch_;
      reshuffle();
    }
    const ReviewGroup& src = groups_[order_[cursor_++]];
    std::vector<std::size_t> idx(src.reviews.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    // Partial Fisher-Yates: the first group_size slots become the sample.
    for (std::size_t i = 0; i < group_size_; ++i) {
      std::uniform_int_distribution<std::size_t> pick(i, idx.size() - 1);
      std::swap(idx[i], idx[pick(rng_)]);
    }
    idx.resize(group_size_);
    std::sort(idx.begin(), idx.end());

    ReviewGroup g;
    g.group_id = src.group_id;
    for (std::size_t i : idx) g.reviews.push_back(src.reviews[i]);
    assign_ids(g, *vocab_);
    batch.groups.push_back(std::move(g));
  }

  for (const auto& g : batch.groups)
    for (const auto& r : g.reviews) batch.padded_length = std::max(batch.padded_length, r.length());

  for (const auto& g : batch.groups) {
    auto& ids = batch.padded_ids.emplace_back();
    auto& ext = batch.padded_extended_ids.emplace_back();
    auto& pad = batch.padding.emplace_back();
    for (const auto& r : g.reviews) {
      auto& a = ids.emplace_back(r.token_ids);
      auto& b = ext.emplace_back(r.extended_ids);
      auto& m = pad.emplace_back(r.length(), false);
      a.resize(batch.padded_length, kPad);
      b.resize(batch.padded_length, kPad);
      m.resize(batch.padded_length, true);
    }
  }
  return batch;
}

// ---- I/O ----------------------------------------------------------------------

std::vector<ReviewGroup> read_groups_jsonl(std::istream& in) {
  std::vector<ReviewGroup> groups;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw std::runtime_error("line " + std::to_string(line_no) + ": " + e.what());
    }
    ReviewGroup g;
    g.group_id = j.at("group_id").get<std::string>();
    for (const auto& r : j.at("reviews")) {
      g.reviews.push_back(make_review(r.at("review_id").get<std::string>(), r.at("text").get<std::string>()));
    }
    groups.push_back(std::move(g));
  }
  return groups;
}

std::vector<ReviewGroup> read_groups_jsonl_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return read_groups_jsonl(in);
}

void write_groups_jsonl(std::ostream& out, std::span<const ReviewGroup> groups) {
  for (const auto& g : groups) {
    nlohmann::json j;
    j["group_id"] = g.group_id;
    j["reviews"] = nlohmann::json::array();
    for (const auto& r : g.reviews) j["reviews"].push_back({{"review_id", r.review_id}, {"text", r.surface_text}});
    out << j.dump() << '\n';
  }
}

}  // namespace copycat
