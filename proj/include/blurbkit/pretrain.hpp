#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "blurbkit/corpus.hpp"
#include "blurbkit/tokenizer.hpp"
#include "blurbkit/vocab.hpp"

namespace blurbkit {

// Stepwise masking-rate schedule: start_rate, raised by `step` after every
// `progress_per_step` of training, capped at end_rate.
struct MaskingSchedule {
  double start_rate = 0.05;
  double end_rate = 0.25;
  double step = 0.05;
  double progress_per_step = 0.20;

  void validate() const;
};

// Throws ConfigError unless 0 <= progress <= 1.
double masking_rate(double progress, const MaskingSchedule& schedule = {});

enum class MaskAction : std::uint8_t { kMask, kKeep, kRandom };

struct MaskingPlan {
  std::vector<std::size_t> positions;  // ascending, unique
  std::vector<MaskAction> actions;
  std::vector<TokenId> replacements;   // kRandom only; -1 otherwise
  std::vector<TokenId> labels;         // original id at each position

  std::size_t size() const { return positions.size(); }
  bool operator==(const MaskingPlan&) const = default;
};

struct SelectionOptions {
  double mask_probability = 0.80;
  double keep_probability = 0.10;  // remainder is kRandom
};

// Draws masking targets. Units are pieces, or whole words when wwm is set.
// Units are visited in uniformly random order and taken unless they would
// push the selection past quota = max(1, round(rate * candidates)); if every
// unit is larger than the quota, one unit is taken. Each unit gets one
// action; kRandom draws an independent non-special replacement per piece.
// Candidates exclude word_index < 0 and the [PAD]/[CLS]/[SEP]/[MASK] ids.
MaskingPlan select_targets(std::span<const TokenId> ids, std::span<const std::int32_t> word_index,
                           double rate, bool wwm, std::uint64_t seed, const Vocabulary& vocab,
                           const SelectionOptions& options = {});
MaskingPlan select_targets(const Encoding& encoding, double rate, bool wwm, std::uint64_t seed,
                           const Vocabulary& vocab, const SelectionOptions& options = {});

inline constexpr TokenId kIgnoreLabel = -100;

struct MaskedSequence {
  std::vector<TokenId> masked_ids;
  std::vector<TokenId> labels;  // original id where selected, kIgnoreLabel elsewhere
};

MaskedSequence apply_plan(std::span<const TokenId> ids, const MaskingPlan& plan,
                          const Vocabulary& vocab);
MaskedSequence apply_plan(const Encoding& encoding, const MaskingPlan& plan,
                          const Vocabulary& vocab);

struct MlmExample {
  std::vector<TokenId> ids;
  std::vector<TokenId> masked_ids;
  std::vector<TokenId> labels;
  std::vector<std::uint8_t> segments;
  std::optional<bool> is_next;

  bool operator==(const MlmExample&) const = default;
};

MlmExample make_mlm_example(const Encoding& encoding, double rate, bool wwm, std::uint64_t seed,
                            const Vocabulary& vocab, std::optional<bool> is_next = {});

// {"ids","masked_ids","labels","segments"[,"is_next"]} on one line.
std::string to_jsonl(const MlmExample& example);
// Little-endian record: u32 n, i32 ids[n], i32 masked_ids[n], i32 labels[n],
// u8 segments[n], i8 is_next (-1 when absent).
void write_binary(std::ostream& out, const MlmExample& example);
std::optional<MlmExample> read_binary(std::istream& in);

struct SentenceRef {
  std::size_t document = 0;
  std::size_t sentence = 0;
  bool operator==(const SentenceRef&) const = default;
};

struct NspPair {
  SentenceRef first;
  SentenceRef second;
  bool is_next = true;
  bool operator==(const NspPair&) const = default;
};

struct NspOptions {
  // Probability that a pair keeps its true successor; 1.0 gives true-only mode.
  double next_probability = 0.5;
};

// For every adjacent sentence pair in every document, keep the true successor
// with next_probability, otherwise pair with a random sentence from a
// different document. Each document draws from its own derived seed.
std::vector<NspPair> build_nsp_pairs(std::span<const Document> documents, std::uint64_t seed,
                                     const NspOptions& options = {});

}  // namespace blurbkit
