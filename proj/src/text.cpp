#include "blurbkit/text.hpp"

#include "blurbkit/error.hpp"
#include "blurbkit/unicode.hpp"

namespace blurbkit {

std::string_view to_string(Casing casing) {
  return casing == Casing::kCased ? "cased" : "uncased";
}

Casing parse_casing(std::string_view name) {
  if (name == "cased") return Casing::kCased;
  if (name == "uncased") return Casing::kUncased;
  throw ConfigError("unknown casing '" + std::string(name) + "' (expected cased|uncased)");
}

namespace {

// Drops NUL, U+FFFD and control/format characters; maps whitespace to ' '.
std::string clean(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  std::size_t pos = 0;
  while (pos < text.size()) {
    const char32_t cp = unicode::next_code_point(text, pos);
    if (cp == 0 || cp == unicode::kReplacement || unicode::is_control(cp)) continue;
    if (unicode::is_whitespace(cp)) {
      out.push_back(' ');
    } else {
      unicode::append_utf8(out, cp);
    }
  }
  return out;
}

std::string strip_marks(std::string_view text) {
  const std::string decomposed = unicode::to_nfd(text);
  std::string out;
  out.reserve(decomposed.size());
  std::size_t pos = 0;
  while (pos < decomposed.size()) {
    const char32_t cp = unicode::next_code_point(decomposed, pos);
    if (!unicode::is_nonspacing_mark(cp)) unicode::append_utf8(out, cp);
  }
  return out;
}

std::string collapse_spaces(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  bool pending_space = false;
  for (char c : text) {
    if (c == ' ') {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out.push_back(' ');
    pending_space = false;
    out.push_back(c);
  }
  return out;
}

}  // namespace

std::string normalize(std::string_view text, const NormalizeOptions& options) {
  std::string s = unicode::to_nfc(clean(text));
  if (options.casing == Casing::kUncased) s = unicode::to_lower(s);
  if (options.strips_accents()) s = strip_marks(s);
  // Lowercasing and decomposition never introduce whitespace, so collapsing
  // last keeps the result stable under re-normalization.
  return collapse_spaces(s);
}

std::string normalize(std::string_view text, Casing casing) {
  return normalize(text, NormalizeOptions{casing, std::nullopt});
}

std::vector<Word> pre_tokenize(std::string_view normalized,
                               const ProtectedTokens* protected_tokens) {
  std::vector<Word> words;
  Word current;
  bool in_word = false;
  const auto flush = [&] {
    if (in_word) words.push_back(std::move(current));
    current = Word{};
    in_word = false;
  };

  std::size_t pos = 0;
  while (pos < normalized.size()) {
    // Whole-chunk match for protected tokens.
    if (protected_tokens != nullptr && !in_word && normalized[pos] != ' ' &&
        (pos == 0 || normalized[pos - 1] == ' ')) {
      std::size_t chunk_end = normalized.find_first_of(" \t\n\r", pos);
      if (chunk_end == std::string_view::npos) chunk_end = normalized.size();
      const std::string chunk(normalized.substr(pos, chunk_end - pos));
      if (protected_tokens->contains(chunk)) {
        words.push_back(Word{chunk, pos, chunk_end});
        pos = chunk_end;
        continue;
      }
    }
    const std::size_t start = pos;
    const char32_t cp = unicode::next_code_point(normalized, pos);
    if (unicode::is_whitespace(cp)) {
      flush();
      continue;
    }
    if (unicode::is_punctuation(cp) || unicode::is_cjk(cp)) {
      flush();
      words.push_back(Word{std::string(normalized.substr(start, pos - start)), start, pos});
      continue;
    }
    if (!in_word) {
      current.begin = start;
      in_word = true;
    }
    current.text.append(normalized.substr(start, pos - start));
    current.end = pos;
  }
  flush();
  return words;
}

std::size_t count_whitespace_words(std::string_view text) {
  std::size_t n = 0;
  bool in_word = false;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const char32_t cp = unicode::next_code_point(text, pos);
    const bool space = unicode::is_whitespace(cp);
    if (!space && !in_word) ++n;
    in_word = !space;
  }
  return n;
}

}  // namespace blurbkit
