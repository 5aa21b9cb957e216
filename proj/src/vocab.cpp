#include "blurbkit/vocab.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <ostream>
#include <sstream>

#include "blurbkit/error.hpp"
#include "blurbkit/io.hpp"

namespace blurbkit {

Vocabulary::Vocabulary(std::vector<std::string> tokens, Casing casing,
                       std::string continuation_prefix)
    : tokens_(std::move(tokens)), casing_(casing), prefix_(std::move(continuation_prefix)) {
  index_.reserve(tokens_.size());
  for (std::size_t i = 0; i < tokens_.size(); ++i) {
    const auto& t = tokens_[i];
    if (t.empty()) throw FormatError("empty token at id " + std::to_string(i));
    auto [it, inserted] = index_.emplace(t, static_cast<TokenId>(i));
    if (!inserted) {
      throw FormatError("duplicate token '" + t + "' at id " + std::to_string(i) +
                        " (first at id " + std::to_string(it->second) + ")");
    }
    max_token_bytes_ = std::max(max_token_bytes_, t.size());
  }
  for (std::size_t k = 0; k < kSpecialTokens.size(); ++k) {
    auto it = index_.find(kSpecialTokens[k]);
    if (it == index_.end()) {
      throw FormatError("vocabulary lacks special token " + std::string(kSpecialTokens[k]));
    }
    special_ids_[k] = it->second;
  }
  non_special_ids_.reserve(tokens_.size());
  for (std::size_t i = 0; i < tokens_.size(); ++i) {
    if (!is_special(static_cast<TokenId>(i))) non_special_ids_.push_back(static_cast<TokenId>(i));
  }
}

const std::string& Vocabulary::token(TokenId id) const {
  if (id < 0 || static_cast<std::size_t>(id) >= tokens_.size()) {
    throw DataError("token id " + std::to_string(id) + " out of range [0, " +
                    std::to_string(tokens_.size()) + ")");
  }
  return tokens_[static_cast<std::size_t>(id)];
}

std::optional<TokenId> Vocabulary::find(std::string_view token) const {
  auto it = index_.find(token);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

TokenId Vocabulary::id(std::string_view token) const {
  if (auto found = find(token)) return *found;
  throw DataError("token '" + std::string(token) + "' not in vocabulary");
}

bool Vocabulary::is_special(TokenId id) const {
  return std::find(special_ids_.begin(), special_ids_.end(), id) != special_ids_.end();
}

bool Vocabulary::has_canonical_special_layout() const {
  for (std::size_t k = 0; k < special_ids_.size(); ++k) {
    if (special_ids_[k] != static_cast<TokenId>(k)) return false;
  }
  return true;
}

Vocabulary Vocabulary::with_added_tokens(std::span<const std::string> extra) const {
  std::vector<std::string> tokens = tokens_;
  std::unordered_map<std::string, TokenId, StringHash, std::equal_to<>> seen;
  for (const auto& t : extra) {
    if (!contains(t) && !seen.contains(t)) {
      seen.emplace(t, 0);
      tokens.push_back(t);
    }
  }
  return Vocabulary(std::move(tokens), casing_, prefix_);
}

void save_vocab(const Vocabulary& vocab, const std::filesystem::path& path) {
  io::AtomicWriter writer(path);
  for (const auto& t : vocab.tokens()) writer.stream() << t << '\n';
  writer.commit();
}

Vocabulary load_vocab(const std::filesystem::path& path, Casing casing,
                      std::string continuation_prefix) {
  std::vector<std::string> tokens;
  std::unordered_map<std::string, std::size_t, StringHash, std::equal_to<>> first_line;
  io::for_each_line(path, [&](std::string_view line, std::size_t number) {
    if (line.empty()) {
      throw FormatError(path.string() + ":" + std::to_string(number) + ": empty token line");
    }
    auto [it, inserted] = first_line.emplace(std::string(line), number);
    if (!inserted) {
      throw FormatError(path.string() + ":" + std::to_string(number) + ": duplicate token '" +
                        std::string(line) + "' (first on line " + std::to_string(it->second) +
                        ")");
    }
    tokens.emplace_back(line);
  });
  return Vocabulary(std::move(tokens), casing, std::move(continuation_prefix));
}

std::string_view to_string(MergeScorer scorer) {
  return scorer == MergeScorer::kFrequency ? "frequency" : "unigram_likelihood";
}

MergeScorer parse_scorer(std::string_view name) {
  if (name == "frequency" || name == "bpe") return MergeScorer::kFrequency;
  if (name == "unigram_likelihood" || name == "wordpiece") return MergeScorer::kUnigramLikelihood;
  throw ConfigError("unknown scorer '" + std::string(name) +
                    "' (expected frequency|unigram_likelihood)");
}

std::string merge_pieces(std::string_view left, std::string_view right,
                         std::string_view continuation_prefix) {
  std::string merged(left);
  if (right.starts_with(continuation_prefix)) right.remove_prefix(continuation_prefix.size());
  merged.append(right);
  return merged;
}

namespace {

std::string format_score(double score) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", score);
  return buf;
}

}  // namespace

void write_merges(const MergeHistory& merges, std::ostream& out) {
  for (const auto& m : merges) out << m.left << '\t' << m.right << '\t' << format_score(m.score) << '\n';
}

void save_merges(const MergeHistory& merges, const std::filesystem::path& path) {
  io::AtomicWriter writer(path);
  write_merges(merges, writer.stream());
  writer.commit();
}

MergeHistory load_merges(const std::filesystem::path& path, std::string_view continuation_prefix) {
  MergeHistory merges;
  io::for_each_line(path, [&](std::string_view line, std::size_t number) {
    if (line.empty()) return;
    const auto t1 = line.find('\t');
    const auto t2 = t1 == std::string_view::npos ? t1 : line.find('\t', t1 + 1);
    if (t2 == std::string_view::npos) {
      throw FormatError(path.string() + ":" + std::to_string(number) +
                        ": expected 'left<TAB>right<TAB>score'");
    }
    Merge m;
    m.left = std::string(line.substr(0, t1));
    m.right = std::string(line.substr(t1 + 1, t2 - t1 - 1));
    const std::string score(line.substr(t2 + 1));
    try {
      std::size_t used = 0;
      m.score = std::stod(score, &used);
      if (used != score.size()) throw std::invalid_argument(score);
    } catch (const std::exception&) {
      throw FormatError(path.string() + ":" + std::to_string(number) + ": bad score '" + score + "'");
    }
    m.merged = merge_pieces(m.left, m.right, continuation_prefix);
    merges.push_back(std::move(m));
  });
  return merges;
}

}  // namespace blurbkit
