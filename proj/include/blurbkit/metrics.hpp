#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "blurbkit/datasets.hpp"
#include "blurbkit/tagging.hpp"
#include "blurbkit/taskprep.hpp"

namespace blurbkit {

struct MetricReport {
  std::string dataset;
  std::string metric;  // entity_f1 | word_macro_f1 | micro_f1 | pearson | accuracy
  double value = 0.0;  // fraction in [0, 1] (pearson in [-1, 1])
  std::map<std::string, double> support;  // tp/fp/fn/precision/recall or n
  bool degenerate = false;                // 0/0 F1

  nlohmann::ordered_json to_json() const;
};

struct Counts {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;

  Counts& operator+=(const Counts& o) {
    tp += o.tp;
    fp += o.fp;
    fn += o.fn;
    return *this;
  }
};

// F1 from counts; 0/0 is 0 and sets `degenerate` when given.
double f1_score(const Counts& c, bool* degenerate = nullptr);

// Exact (start, end, type) matches over one sentence.
MetricReport entity_f1(std::span<const EntitySpan> gold, std::span<const EntitySpan> pred);
// Pooled over sentences.
MetricReport entity_f1(std::span<const std::vector<EntitySpan>> gold,
                       std::span<const std::vector<EntitySpan>> pred);

// Binary word-level F1 per element pooled over all abstracts, then the mean
// over P, I, O.
MetricReport word_macro_f1_pico(std::span<const PicoLabels> gold, std::span<const PicoLabels> pred);
MetricReport word_macro_f1_pico(const PicoLabels& gold, const PicoLabels& pred);

// Single-label micro F1 pooled over every class except `negative_label`.
// Without a negative label this equals accuracy.
MetricReport micro_f1(std::span<const std::string> gold, std::span<const std::string> pred,
                      std::optional<std::string_view> negative_label = std::nullopt);
// Multi-label micro F1 pooled over binary labels (HoC, abstract level).
MetricReport micro_f1_multilabel(std::span<const std::vector<bool>> gold,
                                 std::span<const std::vector<bool>> pred);

// Sample Pearson correlation. Throws DataError on length mismatch, n < 2 or
// zero variance.
MetricReport pearson(std::span<const double> x, std::span<const double> y);

// Throws DataError on empty input or length mismatch.
MetricReport accuracy(std::span<const std::string> gold, std::span<const std::string> pred);

struct BlurbScore {
  std::map<Dataset, double> per_dataset;
  std::array<double, kTaskTypeCount> per_task_avg{};
  double score = 0.0;  // unrounded

  nlohmann::ordered_json to_json() const;
};

// Percent-scale scores for all 13 datasets. Throws DataError naming the
// first missing dataset.
BlurbScore blurb_score(const std::map<Dataset, double>& per_dataset);
// Keys are dataset names (see parse_dataset).
BlurbScore blurb_score(const std::map<std::string, double>& per_dataset);

// Two-decimal display value ("81.16").
std::string format_score(double value);

}  // namespace blurbkit
