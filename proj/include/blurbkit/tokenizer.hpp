#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "blurbkit/text.hpp"
#include "blurbkit/vocab.hpp"

namespace blurbkit {

struct TokenizerConfig {
  Casing casing = Casing::kUncased;
  std::optional<bool> strip_accents;  // unset: strip iff uncased
  std::size_t max_word_chars = 100;
  std::size_t max_seq_len = 512;
  // Whitespace-delimited chunks kept whole by pre-tokenization (stored in
  // their normalized form), e.g. entity markers.
  std::vector<std::string> protected_tokens;

  NormalizeOptions normalize_options() const { return {casing, strip_accents}; }
  void validate() const;
};

struct Offset {
  std::size_t begin = 0;
  std::size_t end = 0;
  bool operator==(const Offset&) const = default;
};

// Body pieces of one text span, before special tokens are added.
struct Segment {
  std::string normalized;
  std::vector<std::string> pieces;
  std::vector<TokenId> ids;
  std::vector<std::int32_t> word_index;  // 0-based word ordinal within the span
  std::vector<Offset> offsets;           // into `normalized`
  std::size_t word_count = 0;

  std::size_t size() const { return pieces.size(); }
  void truncate(std::size_t n);
};

struct Encoding {
  static constexpr std::int32_t kSpecialWord = -1;

  std::vector<std::string> pieces;
  std::vector<TokenId> ids;
  // Source word ordinal per piece, numbered across both segments of a pair;
  // kSpecialWord for [CLS]/[SEP].
  std::vector<std::int32_t> word_index;
  std::vector<std::uint8_t> segment_ids;
  std::vector<Offset> offsets;  // special tokens get (0, 0)

  std::size_t size() const { return ids.size(); }
  bool operator==(const Encoding&) const = default;
};

// Greedy longest-match-first. Returns {unk} for words longer than
// max_word_chars code points or with an unmatchable remainder.
std::vector<std::string> wordpiece_tokenize(std::string_view word, const Vocabulary& vocab,
                                            std::size_t max_word_chars = 100);

// Pieces joined with spaces, continuation pieces glued to their predecessor,
// special tokens dropped. Throws DataError on ids outside the vocabulary.
std::string decode(std::span<const TokenId> ids, const Vocabulary& vocab);

class Tokenizer {
 public:
  Tokenizer(std::shared_ptr<const Vocabulary> vocab, TokenizerConfig config);

  const Vocabulary& vocab() const { return *vocab_; }
  std::shared_ptr<const Vocabulary> shared_vocab() const { return vocab_; }
  const TokenizerConfig& config() const { return config_; }

  std::string normalize(std::string_view text) const;
  std::vector<Word> pre_tokenize(std::string_view normalized) const;

  // Untruncated body pieces of a text.
  Segment tokenize(std::string_view text) const;
  // Pre-split words (e.g. CoNLL tokens): every piece of words[i] gets word
  // ordinal i even if normalization splits the word further.
  Segment tokenize_words(std::span<const std::string> words) const;

  // [CLS] body [SEP], truncated to max_len (default config.max_seq_len).
  Encoding encode(std::string_view text, std::optional<std::size_t> max_len = {}) const;
  Encoding encode_segment(Segment body, std::optional<std::size_t> max_len = {}) const;
  // [CLS] a [SEP] b [SEP]; longest-first truncation one piece at a time
  // (ties trim b).
  Encoding encode_pair(std::string_view a, std::string_view b,
                       std::optional<std::size_t> max_len = {}) const;
  Encoding encode_segments(Segment a, Segment b, std::optional<std::size_t> max_len = {}) const;

  std::string decode(std::span<const TokenId> ids) const { return blurbkit::decode(ids, *vocab_); }

 private:
  void append_word(Segment& seg, std::string_view word, std::size_t base_offset,
                   std::int32_t ordinal) const;
  std::size_t resolve_max(std::optional<std::size_t> max_len, std::size_t specials) const;

  std::shared_ptr<const Vocabulary> vocab_;
  TokenizerConfig config_;
  ProtectedTokens protected_;
};

}  // namespace blurbkit
