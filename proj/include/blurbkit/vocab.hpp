#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "blurbkit/corpus.hpp"
#include "blurbkit/text.hpp"

namespace blurbkit {

using TokenId = std::int32_t;

struct StringHash {
  using is_transparent = void;
  std::size_t operator()(std::string_view s) const noexcept {
    return std::hash<std::string_view>{}(s);
  }
};

inline constexpr std::array<std::string_view, 5> kSpecialTokens = {"[PAD]", "[UNK]", "[CLS]",
                                                                   "[SEP]", "[MASK]"};

// Ordered token set; ids are positions. Immutable once constructed.
class Vocabulary {
 public:
  // Throws FormatError on empty or duplicate tokens or missing special tokens.
  explicit Vocabulary(std::vector<std::string> tokens, Casing casing = Casing::kUncased,
                      std::string continuation_prefix = "##");

  std::size_t size() const { return tokens_.size(); }
  const std::vector<std::string>& tokens() const { return tokens_; }
  const std::string& token(TokenId id) const;
  std::optional<TokenId> find(std::string_view token) const;
  bool contains(std::string_view token) const { return find(token).has_value(); }
  // Throws DataError for unknown tokens.
  TokenId id(std::string_view token) const;

  Casing casing() const { return casing_; }
  const std::string& continuation_prefix() const { return prefix_; }
  bool is_continuation(std::string_view piece) const { return piece.starts_with(prefix_); }

  TokenId pad_id() const { return special_ids_[0]; }
  TokenId unk_id() const { return special_ids_[1]; }
  TokenId cls_id() const { return special_ids_[2]; }
  TokenId sep_id() const { return special_ids_[3]; }
  TokenId mask_id() const { return special_ids_[4]; }
  bool is_special(TokenId id) const;
  // Every id that is not one of the five special tokens, ascending.
  const std::vector<TokenId>& non_special_ids() const { return non_special_ids_; }

  // True when the specials sit at ids 0..4 in canonical order (trained layout).
  bool has_canonical_special_layout() const;
  std::size_t max_token_bytes() const { return max_token_bytes_; }

  // New vocabulary with the absent tokens appended in the given order.
  Vocabulary with_added_tokens(std::span<const std::string> extra) const;

  bool operator==(const Vocabulary& other) const {
    return tokens_ == other.tokens_ && casing_ == other.casing_ && prefix_ == other.prefix_;
  }

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, TokenId, StringHash, std::equal_to<>> index_;
  Casing casing_;
  std::string prefix_;
  std::array<TokenId, 5> special_ids_{};
  std::vector<TokenId> non_special_ids_;
  std::size_t max_token_bytes_ = 0;
};

// vocab.txt: one token per line, id = zero-based line index.
void save_vocab(const Vocabulary& vocab, const std::filesystem::path& path);
Vocabulary load_vocab(const std::filesystem::path& path, Casing casing = Casing::kUncased,
                      std::string continuation_prefix = "##");

enum class MergeScorer { kFrequency, kUnigramLikelihood };

std::string_view to_string(MergeScorer scorer);
MergeScorer parse_scorer(std::string_view name);

struct VocabTrainConfig {
  std::size_t target_size = 30000;
  std::int64_t min_pair_frequency = 2;
  MergeScorer scorer = MergeScorer::kFrequency;
  Casing casing = Casing::kUncased;
  std::string continuation_prefix = "##";
  // Parallelism for pair statistics; never changes the result.
  std::size_t workers = 1;
};

struct Merge {
  std::string left;
  std::string right;
  std::string merged;
  double score = 0.0;

  bool operator==(const Merge&) const = default;
};

using MergeHistory = std::vector<Merge>;

// "left<TAB>right<TAB>score" lines; the merged piece is implied.
void write_merges(const MergeHistory& merges, std::ostream& out);
void save_merges(const MergeHistory& merges, const std::filesystem::path& path);
MergeHistory load_merges(const std::filesystem::path& path, std::string_view continuation_prefix = "##");

// Concatenation of two pieces; the result keeps the left piece's
// word-initial/continuation status.
std::string merge_pieces(std::string_view left, std::string_view right,
                         std::string_view continuation_prefix);

struct SegmentedWord {
  std::string word;
  std::int64_t count = 0;
  std::vector<std::string> pieces;

  bool operator==(const SegmentedWord&) const = default;
};

struct ShatterResult {
  std::vector<SegmentedWord> words;  // in table (word) order
  std::vector<std::string> alphabet; // sorted, unique
};

// Splits every word into characters; non-initial characters carry the
// continuation prefix. Throws DataError on an empty table.
ShatterResult shatter(const WordFrequencyTable& table, std::string_view continuation_prefix = "##");

enum class StopReason { kTargetReached, kNoEligiblePair };

struct TrainResult {
  Vocabulary vocab;
  MergeHistory merges;
  StopReason stop = StopReason::kTargetReached;
  std::size_t alphabet_size = 0;
};

// Greedy merge training. Token layout: specials (ids 0-4), alphabet in
// byte order, then merged pieces in merge order. Ties break on the smallest
// merged string, then on (left, right).
TrainResult train_vocab(const WordFrequencyTable& table, const VocabTrainConfig& config);
TrainResult train_bpe(const WordFrequencyTable& table, VocabTrainConfig config);
TrainResult train_wordpiece(const WordFrequencyTable& table, VocabTrainConfig config);

// Replays merges from the shattered state and rebuilds the vocabulary.
Vocabulary replay_merges(const WordFrequencyTable& table, const MergeHistory& merges,
                         Casing casing = Casing::kUncased,
                         std::string_view continuation_prefix = "##");

}  // namespace blurbkit
