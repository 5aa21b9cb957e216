#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace blurbkit {

enum class Casing { kCased, kUncased };

std::string_view to_string(Casing casing);
Casing parse_casing(std::string_view name);

struct NormalizeOptions {
  Casing casing = Casing::kUncased;
  // Unset means "strip iff uncased", the reference uncased tokenizer's behavior.
  std::optional<bool> strip_accents;

  bool strips_accents() const {
    return strip_accents.value_or(casing == Casing::kUncased);
  }
};

// Cleans control characters, applies NFC, lowercases (uncased), optionally
// strips combining marks, and collapses whitespace runs to one ASCII space.
std::string normalize(std::string_view text, const NormalizeOptions& options);
std::string normalize(std::string_view text, Casing casing);

// A pre-token with its byte range in the normalized text.
struct Word {
  std::string text;
  std::size_t begin = 0;
  std::size_t end = 0;

  bool operator==(const Word&) const = default;
};

using ProtectedTokens = std::unordered_set<std::string>;

// Splits normalized text on whitespace, then isolates every punctuation
// character and every CJK ideograph as a word of its own. Whitespace-delimited
// chunks found in `protected_tokens` are emitted whole.
std::vector<Word> pre_tokenize(std::string_view normalized,
                               const ProtectedTokens* protected_tokens = nullptr);

// Number of whitespace-delimited words.
std::size_t count_whitespace_words(std::string_view text);

}  // namespace blurbkit
