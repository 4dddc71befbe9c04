#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace copycat {

using TokenId = std::size_t;

inline constexpr TokenId kPad = 0;
inline constexpr TokenId kBos = 1;
inline constexpr TokenId kEos = 2;
inline constexpr TokenId kUnk = 3;
inline constexpr std::size_t kSpecialCount = 4;

struct Review {
  std::string review_id;
  std::string surface_text;
  std::vector<std::string> tokens;
  // Filled by assign_ids(); same length as tokens.
  std::vector<TokenId> token_ids;
  std::vector<TokenId> extended_ids;

  std::size_t length() const { return tokens.size(); }
};

// Tokenizes the text into a Review with empty id vectors.
Review make_review(std::string review_id, std::string text);

struct ReviewGroup {
  std::string group_id;
  std::vector<Review> reviews;
  // Copyable out-of-vocabulary tokens; oov[k] has extended id V + k.
  std::vector<std::string> oov;

  std::size_t size() const { return reviews.size(); }
};

class Vocabulary {
 public:
  static constexpr std::size_t kDefaultSize = 50000;
  static constexpr std::size_t kDefaultMaxExtended = 30000;

  // Specials only.
  Vocabulary();
  // The first four tokens must be the specials in id order.
  static Vocabulary from_tokens(std::vector<std::string> tokens,
                                std::size_t max_extended = kDefaultMaxExtended);

  std::size_t size() const { return tokens_.size(); }
  std::size_t max_extended() const { return max_extended_; }
  bool contains(std::string_view token) const;
  // UNK for unknown tokens.
  TokenId id(std::string_view token) const;
  const std::string& token(TokenId id) const;
  const std::vector<std::string>& tokens() const { return tokens_; }

  // One token per line, UTF-8, in id order.
  void save(std::ostream& out) const;
  static Vocabulary load(std::istream& in, std::size_t max_extended = kDefaultMaxExtended);

  static const std::vector<std::string>& specials();

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, TokenId> index_;
  std::size_t max_extended_ = kDefaultMaxExtended;
};

// Keeps the (size - 4) most frequent tokens after the specials, ties broken
// lexicographically. Throws when the corpus has no tokens or size < 4.
Vocabulary build_vocabulary(std::span<const Review> reviews, std::size_t size,
                            std::size_t max_extended = Vocabulary::kDefaultMaxExtended);
Vocabulary build_vocabulary(std::span<const ReviewGroup> groups, std::size_t size,
                            std::size_t max_extended = Vocabulary::kDefaultMaxExtended);

// Sets token_ids and extended_ids of every review and rebuilds group.oov.
// OOV tokens get dense ids from V upward in order of first appearance;
// once max_extended of them exist, further ones map to UNK.
void assign_ids(ReviewGroup& group, const Vocabulary& vocab);

struct FilterOptions {
  std::size_t min_reviews = 10;
  std::size_t min_len = 20;
  std::size_t max_len = 70;
  double popularity_pct = 90.0;
};

// 1. drops reviews whose token count is outside [min_len, max_len];
// 2. drops groups left with fewer than min_reviews reviews;
// 3. drops groups whose review count strictly exceeds the nearest-rank
//    popularity_pct percentile of the surviving counts.
std::vector<ReviewGroup> filter_groups(std::vector<ReviewGroup> groups, const FilterOptions& options);

// Nearest-rank percentile: the ceil(pct/100 * n)-th smallest value.
std::size_t nearest_rank_percentile(std::vector<std::size_t> values, double pct);

struct Batch {
  // Sampled groups with ids assigned; each carries its own OOV table.
  std::vector<ReviewGroup> groups;
  std::size_t padded_length = 0;
  // [group][review][position]; padding holds kPad.
  std::vector<std::vector<std::vector<TokenId>>> padded_ids;
  std::vector<std::vector<std::vector<TokenId>>> padded_extended_ids;
  // true exactly at padded positions.
  std::vector<std::vector<std::vector<bool>>> padding;
};

// Endless, reproducible stream of batches. Group order is reshuffled every
// epoch; each emitted group is group_size reviews sampled without
// replacement.
class BatchStream {
 public:
  BatchStream(std::vector<ReviewGroup> groups, const Vocabulary& vocab, std::size_t group_size,
              std::size_t groups_per_batch, std::uint64_t seed);

  Batch next();
  std::size_t epoch() const { return epoch_; }
  std::size_t group_count() const { return groups_.size(); }

 private:
  void reshuffle();

  std::vector<ReviewGroup> groups_;
  const Vocabulary* vocab_;
  std::size_t group_size_;
  std::size_t groups_per_batch_;
  std::mt19937_64 rng_;
  std::vector<std::size_t> order_;
  std::size_t cursor_ = 0;
  std::size_t epoch_ = 0;
};

// Reads {"group_id": str, "reviews": [{"review_id": str, "text": str}]}
// objects, one per line, and tokenizes every review.
std::vector<ReviewGroup> read_groups_jsonl(std::istream& in);
std::vector<ReviewGroup> read_groups_jsonl_file(const std::string& path);
void write_groups_jsonl(std::ostream& out, std::span<const ReviewGroup> groups);

}  // namespace copycat
