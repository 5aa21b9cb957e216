#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "blurbkit/taskprep.hpp"
#include "blurbkit/tokenizer.hpp"

namespace blurbkit {

struct TermFragmentation {
  std::string term;
  std::string normalized;
  std::vector<std::string> pieces;
  bool whole = false;  // one piece equal to the normalized term
  bool unk = false;    // every piece is [UNK]
};

struct FragmentationReport {
  std::vector<TermFragmentation> terms;
  double mean_piece_count = 0.0;
  double whole_fraction = 0.0;
  double unk_fraction = 0.0;
  std::size_t whole_count = 0;

  nlohmann::ordered_json to_json() const;
  std::string to_text() const;  // aligned columns
};

// Terms are tokenized through the tokenizer's normalization; throws
// ConfigError on an empty term list.
FragmentationReport fragmentation_report(const Tokenizer& tokenizer,
                                         std::span<const std::string> terms);

struct LengthReport {
  std::string corpus_id;
  std::string vocab_id;
  std::size_t records = 0;
  std::size_t empty_records = 0;  // counted as length 0
  double total_pieces = 0.0;
  double mean = 0.0;

  nlohmann::ordered_json to_json() const;
};

// Mean non-special pieces per record, before truncation; [UNK] counts as one
// piece. Uses compensated summation, so the result does not depend on order.
LengthReport avg_length(const Tokenizer& tokenizer, std::span<const std::string> texts);
// Task records after the task's input transformation (relation text in
// `mode`, pairs counted over both segments).
LengthReport avg_length(const Tokenizer& tokenizer, std::span<const TaskRecord> records,
                        RelationMode mode = RelationMode::kDummify);

struct VocabComparison {
  std::string name_a;
  std::string name_b;
  FragmentationReport fragmentation_a;
  FragmentationReport fragmentation_b;
  LengthReport length_a;
  LengthReport length_b;
  std::vector<long> piece_count_delta;  // b - a per term

  double mean_length_delta() const { return length_b.mean - length_a.mean; }
  nlohmann::ordered_json to_json() const;
  std::string to_text() const;
};

VocabComparison compare_vocabs(const Tokenizer& a, const Tokenizer& b,
                               std::span<const std::string> terms,
                               std::span<const std::string> corpus, std::string name_a = "a",
                               std::string name_b = "b");

// Neumaier-compensated sum.
class CompensatedSum {
 public:
  void add(double x);
  double value() const { return sum_ + compensation_; }

 private:
  double sum_ = 0.0;
  double compensation_ = 0.0;
};

// Seventeen biomedical terms used to probe fragmentation.
const std::vector<std::string>& probe_terms();

}  // namespace blurbkit
