#include "blurbkit/tokenizer.hpp"

#include <algorithm>

#include "blurbkit/error.hpp"
#include "blurbkit/unicode.hpp"

namespace blurbkit {

void TokenizerConfig::validate() const {
  if (max_seq_len < 3) {
    throw ConfigError("max_seq_len must be >= 3 (room for [CLS], one piece and [SEP])");
  }
  if (max_word_chars == 0) throw ConfigError("max_word_chars must be positive");
}

void Segment::truncate(std::size_t n) {
  if (n >= pieces.size()) return;
  pieces.resize(n);
  ids.resize(n);
  word_index.resize(n);
  offsets.resize(n);
}

namespace {

struct PieceSpan {
  TokenId id;
  std::size_t begin;  // byte offsets within the word
  std::size_t end;
};

// Empty result means the word maps to [UNK].
std::vector<PieceSpan> wordpiece_spans(std::string_view word, const Vocabulary& vocab,
                                       std::size_t max_word_chars) {
  std::vector<std::size_t> bounds{0};
  for (std::size_t pos = 0; pos < word.size();) {
    unicode::next_code_point(word, pos);
    bounds.push_back(pos);
  }
  const std::size_t n = bounds.size() - 1;
  if (n == 0 || n > max_word_chars) return {};

  const std::string& prefix = vocab.continuation_prefix();
  std::vector<PieceSpan> out;
  std::string candidate;
  std::size_t start = 0;
  while (start < n) {
    const std::size_t lead = start > 0 ? prefix.size() : 0;
    std::size_t end = n;
    while (end > start && bounds[end] - bounds[start] + lead > vocab.max_token_bytes()) --end;
    std::optional<TokenId> match;
    for (; end > start; --end) {
      candidate.clear();
      if (start > 0) candidate.append(prefix);
      candidate.append(word.substr(bounds[start], bounds[end] - bounds[start]));
      if ((match = vocab.find(candidate))) break;
    }
    if (!match) return {};
    out.push_back(PieceSpan{*match, bounds[start], bounds[end]});
    start = end;
  }
  return out;
}

}  // namespace

std::vector<std::string> wordpiece_tokenize(std::string_view word, const Vocabulary& vocab,
                                            std::size_t max_word_chars) {
  std::vector<std::string> pieces;
  const auto spans = wordpiece_spans(word, vocab, max_word_chars);
  if (spans.empty()) {
    pieces.push_back(vocab.token(vocab.unk_id()));
    return pieces;
  }
  for (const auto& s : spans) pieces.push_back(vocab.token(s.id));
  return pieces;
}

std::string decode(std::span<const TokenId> ids, const Vocabulary& vocab) {
  std::string out;
  for (const TokenId id : ids) {
    const std::string& token = vocab.token(id);
    if (vocab.is_special(id)) continue;
    if (vocab.is_continuation(token)) {
      out.append(token, vocab.continuation_prefix().size());
    } else {
      if (!out.empty()) out.push_back(' ');
      out.append(token);
    }
  }
  return out;
}

Tokenizer::Tokenizer(std::shared_ptr<const Vocabulary> vocab, TokenizerConfig config)
    : vocab_(std::move(vocab)), config_(std::move(config)) {
  if (!vocab_) throw ConfigError("tokenizer requires a vocabulary");
  config_.validate();
  for (const auto& t : config_.protected_tokens) protected_.insert(normalize(t));
}

std::string Tokenizer::normalize(std::string_view text) const {
  return blurbkit::normalize(text, config_.normalize_options());
}

std::vector<Word> Tokenizer::pre_tokenize(std::string_view normalized) const {
  return blurbkit::pre_tokenize(normalized, protected_.empty() ? nullptr : &protected_);
}

void Tokenizer::append_word(Segment& seg, std::string_view word, std::size_t base_offset,
                            std::int32_t ordinal) const {
  const auto spans = wordpiece_spans(word, *vocab_, config_.max_word_chars);
  if (spans.empty()) {
    seg.pieces.push_back(vocab_->token(vocab_->unk_id()));
    seg.ids.push_back(vocab_->unk_id());
    seg.word_index.push_back(ordinal);
    seg.offsets.push_back(Offset{base_offset, base_offset + word.size()});
    return;
  }
  for (const auto& s : spans) {
    seg.pieces.push_back(vocab_->token(s.id));
    seg.ids.push_back(s.id);
    seg.word_index.push_back(ordinal);
    seg.offsets.push_back(Offset{base_offset + s.begin, base_offset + s.end});
  }
}

Segment Tokenizer::tokenize(std::string_view text) const {
  Segment seg;
  seg.normalized = normalize(text);
  const auto words = pre_tokenize(seg.normalized);
  for (std::size_t i = 0; i < words.size(); ++i) {
    append_word(seg, words[i].text, words[i].begin, static_cast<std::int32_t>(i));
  }
  seg.word_count = words.size();
  return seg;
}

Segment Tokenizer::tokenize_words(std::span<const std::string> words) const {
  Segment seg;
  for (std::size_t i = 0; i < words.size(); ++i) {
    const std::string normalized = normalize(words[i]);
    if (!seg.normalized.empty()) seg.normalized.push_back(' ');
    const std::size_t base = seg.normalized.size();
    seg.normalized.append(normalized);
    const auto ordinal = static_cast<std::int32_t>(i);
    const auto sub = pre_tokenize(normalized);
    if (sub.empty()) {
      // Keep word alignment even when normalization erases the word.
      seg.pieces.push_back(vocab_->token(vocab_->unk_id()));
      seg.ids.push_back(vocab_->unk_id());
      seg.word_index.push_back(ordinal);
      seg.offsets.push_back(Offset{base, base});
      continue;
    }
    for (const auto& w : sub) append_word(seg, w.text, base + w.begin, ordinal);
  }
  seg.word_count = words.size();
  return seg;
}

std::size_t Tokenizer::resolve_max(std::optional<std::size_t> max_len, std::size_t specials) const {
  const std::size_t max = max_len.value_or(config_.max_seq_len);
  if (max < specials + 1) {
    throw ConfigError("max length " + std::to_string(max) + " leaves no room for body pieces");
  }
  return max - specials;
}

namespace {

void push_special(Encoding& enc, TokenId id, const Vocabulary& vocab, std::uint8_t segment) {
  enc.pieces.push_back(vocab.token(id));
  enc.ids.push_back(id);
  enc.word_index.push_back(Encoding::kSpecialWord);
  enc.segment_ids.push_back(segment);
  enc.offsets.push_back(Offset{});
}

void push_body(Encoding& enc, const Segment& seg, std::uint8_t segment, std::int32_t word_base) {
  for (std::size_t i = 0; i < seg.size(); ++i) {
    enc.pieces.push_back(seg.pieces[i]);
    enc.ids.push_back(seg.ids[i]);
    enc.word_index.push_back(seg.word_index[i] + word_base);
    enc.segment_ids.push_back(segment);
    enc.offsets.push_back(seg.offsets[i]);
  }
}

}  // namespace

Encoding Tokenizer::encode(std::string_view text, std::optional<std::size_t> max_len) const {
  return encode_segment(tokenize(text), max_len);
}

Encoding Tokenizer::encode_segment(Segment body, std::optional<std::size_t> max_len) const {
  body.truncate(resolve_max(max_len, 2));
  Encoding enc;
  push_special(enc, vocab_->cls_id(), *vocab_, 0);
  push_body(enc, body, 0, 0);
  push_special(enc, vocab_->sep_id(), *vocab_, 0);
  return enc;
}

Encoding Tokenizer::encode_pair(std::string_view a, std::string_view b,
                                std::optional<std::size_t> max_len) const {
  return encode_segments(tokenize(a), tokenize(b), max_len);
}

Encoding Tokenizer::encode_segments(Segment a, Segment b, std::optional<std::size_t> max_len) const {
  const std::size_t budget = resolve_max(max_len, 3);
  while (a.size() + b.size() > budget) {
    if (a.size() > b.size()) {
      a.truncate(a.size() - 1);
    } else {
      b.truncate(b.size() - 1);
    }
  }
  Encoding enc;
  push_special(enc, vocab_->cls_id(), *vocab_, 0);
  push_body(enc, a, 0, 0);
  push_special(enc, vocab_->sep_id(), *vocab_, 0);
  push_body(enc, b, 1, static_cast<std::int32_t>(a.word_count));
  push_special(enc, vocab_->sep_id(), *vocab_, 1);
  return enc;
}

}  // namespace blurbkit
