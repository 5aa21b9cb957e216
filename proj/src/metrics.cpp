#include "blurbkit/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>

#include "blurbkit/error.hpp"

namespace blurbkit {

using nlohmann::ordered_json;

ordered_json MetricReport::to_json() const {
  ordered_json j;
  j["dataset"] = dataset;
  j["metric"] = metric;
  j["value"] = value;
  ordered_json s = ordered_json::object();
  for (const auto& [k, v] : support) s[k] = v;
  j["support"] = s;
  if (degenerate) j["degenerate"] = true;
  return j;
}

double f1_score(const Counts& c, bool* degenerate) {
  const double denom = 2.0 * static_cast<double>(c.tp) + static_cast<double>(c.fp + c.fn);
  if (degenerate != nullptr) *degenerate = denom == 0.0;
  if (denom == 0.0) return 0.0;
  // 2PR/(P+R) reduces to 2tp/(2tp+fp+fn); the reduced form is exact for tp=0.
  return 2.0 * static_cast<double>(c.tp) / denom;
}

namespace {

MetricReport f1_report(std::string metric, const Counts& c) {
  MetricReport r;
  r.metric = std::move(metric);
  r.value = f1_score(c);
  // Only a 0/0 is degenerate; tp = 0 with predictions or gold is a genuine zero.
  r.degenerate = c.tp + c.fp + c.fn == 0;
  r.support = {{"tp", static_cast<double>(c.tp)},
               {"fp", static_cast<double>(c.fp)},
               {"fn", static_cast<double>(c.fn)},
               {"precision", c.tp + c.fp == 0 ? 0.0
                                              : static_cast<double>(c.tp) /
                                                    static_cast<double>(c.tp + c.fp)},
               {"recall", c.tp + c.fn == 0 ? 0.0
                                           : static_cast<double>(c.tp) /
                                                 static_cast<double>(c.tp + c.fn)}};
  return r;
}

template <typename A, typename B>
void check_lengths(const A& a, const B& b, std::string_view what) {
  if (a.size() != b.size()) {
    throw DataError(std::string(what) + ": gold has " + std::to_string(a.size()) +
                    " items but prediction has " + std::to_string(b.size()));
  }
}

Counts span_counts(std::span<const EntitySpan> gold, std::span<const EntitySpan> pred) {
  const std::set<EntitySpan> g(gold.begin(), gold.end());
  const std::set<EntitySpan> p(pred.begin(), pred.end());
  Counts c;
  for (const auto& s : p) {
    if (g.contains(s)) {
      ++c.tp;
    } else {
      ++c.fp;
    }
  }
  c.fn = g.size() - c.tp;
  return c;
}

}  // namespace

MetricReport entity_f1(std::span<const EntitySpan> gold, std::span<const EntitySpan> pred) {
  return f1_report("entity_f1", span_counts(gold, pred));
}

MetricReport entity_f1(std::span<const std::vector<EntitySpan>> gold,
                       std::span<const std::vector<EntitySpan>> pred) {
  check_lengths(gold, pred, "entity_f1");
  Counts c;
  for (std::size_t i = 0; i < gold.size(); ++i) c += span_counts(gold[i], pred[i]);
  return f1_report("entity_f1", c);
}

MetricReport word_macro_f1_pico(std::span<const PicoLabels> gold, std::span<const PicoLabels> pred) {
  check_lengths(gold, pred, "word_macro_f1");
  std::array<Counts, 3> counts{};
  for (std::size_t a = 0; a < gold.size(); ++a) {
    gold[a].validate();
    pred[a].validate();
    if (gold[a].size() != pred[a].size()) {
      throw DataError("word_macro_f1: abstract " + std::to_string(a) + " has " +
                      std::to_string(gold[a].size()) + " gold words but " +
                      std::to_string(pred[a].size()) + " predicted");
    }
    for (std::size_t e = 0; e < 3; ++e) {
      const auto& g = gold[a].elements[e];
      const auto& p = pred[a].elements[e];
      for (std::size_t w = 0; w < g.size(); ++w) {
        if (g[w] && p[w]) {
          ++counts[e].tp;
        } else if (p[w]) {
          ++counts[e].fp;
        } else if (g[w]) {
          ++counts[e].fn;
        }
      }
    }
  }
  MetricReport r;
  r.metric = "word_macro_f1";
  static constexpr const char* kNames[3] = {"P", "I", "O"};
  double sum = 0.0;
  for (std::size_t e = 0; e < 3; ++e) {
    const double f = f1_score(counts[e]);
    sum += f;
    r.support[std::string(kNames[e]) + "_f1"] = f;
    r.support[std::string(kNames[e]) + "_tp"] = static_cast<double>(counts[e].tp);
    r.support[std::string(kNames[e]) + "_fp"] = static_cast<double>(counts[e].fp);
    r.support[std::string(kNames[e]) + "_fn"] = static_cast<double>(counts[e].fn);
    r.degenerate |= counts[e].tp + counts[e].fp + counts[e].fn == 0;
  }
  r.value = sum / 3.0;
  return r;
}

MetricReport word_macro_f1_pico(const PicoLabels& gold, const PicoLabels& pred) {
  return word_macro_f1_pico(std::span<const PicoLabels>(&gold, 1),
                            std::span<const PicoLabels>(&pred, 1));
}

MetricReport micro_f1(std::span<const std::string> gold, std::span<const std::string> pred,
                      std::optional<std::string_view> negative_label) {
  check_lengths(gold, pred, "micro_f1");
  Counts c;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    const bool gold_pos = !negative_label || gold[i] != *negative_label;
    const bool pred_pos = !negative_label || pred[i] != *negative_label;
    if (pred_pos && gold_pos && pred[i] == gold[i]) {
      ++c.tp;
      continue;
    }
    if (pred_pos) ++c.fp;
    if (gold_pos) ++c.fn;
  }
  MetricReport r = f1_report("micro_f1", c);
  r.support["n"] = static_cast<double>(gold.size());
  return r;
}

MetricReport micro_f1_multilabel(std::span<const std::vector<bool>> gold,
                                 std::span<const std::vector<bool>> pred) {
  check_lengths(gold, pred, "micro_f1");
  Counts c;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    check_lengths(gold[i], pred[i], "micro_f1 label vector " + std::to_string(i));
    for (std::size_t k = 0; k < gold[i].size(); ++k) {
      if (gold[i][k] && pred[i][k]) {
        ++c.tp;
      } else if (pred[i][k]) {
        ++c.fp;
      } else if (gold[i][k]) {
        ++c.fn;
      }
    }
  }
  MetricReport r = f1_report("micro_f1", c);
  r.support["n"] = static_cast<double>(gold.size());
  return r;
}

MetricReport pearson(std::span<const double> x, std::span<const double> y) {
  check_lengths(x, y, "pearson");
  const std::size_t n = x.size();
  if (n < 2) throw DataError("pearson needs at least 2 points, got " + std::to_string(n));
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxy = 0.0;
  double sxx = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) {
    throw DataError(std::string("pearson is undefined: ") + (sxx == 0.0 ? "x" : "y") +
                    " has zero variance");
  }
  MetricReport r;
  r.metric = "pearson";
  r.value = std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
  r.support["n"] = static_cast<double>(n);
  return r;
}

MetricReport accuracy(std::span<const std::string> gold, std::span<const std::string> pred) {
  check_lengths(gold, pred, "accuracy");
  if (gold.empty()) throw DataError("accuracy is undefined on empty input");
  std::size_t correct = 0;
  for (std::size_t i = 0; i < gold.size(); ++i) correct += gold[i] == pred[i];
  MetricReport r;
  r.metric = "accuracy";
  r.value = static_cast<double>(correct) / static_cast<double>(gold.size());
  r.support = {{"correct", static_cast<double>(correct)}, {"n", static_cast<double>(gold.size())}};
  return r;
}

BlurbScore blurb_score(const std::map<Dataset, double>& per_dataset) {
  BlurbScore out;
  std::array<double, kTaskTypeCount> sums{};
  std::array<std::size_t, kTaskTypeCount> counts{};
  for (const auto& info : blurb_datasets()) {
    const auto it = per_dataset.find(info.dataset);
    if (it == per_dataset.end()) {
      throw DataError("BLURB score needs all 13 datasets; missing '" + std::string(info.name) + "'");
    }
    if (!std::isfinite(it->second)) {
      throw DataError("score for '" + std::string(info.name) + "' is not finite");
    }
    out.per_dataset[info.dataset] = it->second;
    const auto t = static_cast<std::size_t>(info.task);
    sums[t] += it->second;
    ++counts[t];
  }
  double total = 0.0;
  for (std::size_t t = 0; t < kTaskTypeCount; ++t) {
    out.per_task_avg[t] = sums[t] / static_cast<double>(counts[t]);
    total += out.per_task_avg[t];
  }
  out.score = total / static_cast<double>(kTaskTypeCount);
  return out;
}

BlurbScore blurb_score(const std::map<std::string, double>& per_dataset) {
  std::map<Dataset, double> keyed;
  for (const auto& [name, value] : per_dataset) {
    const Dataset d = parse_dataset(name);
    if (!keyed.emplace(d, value).second) {
      throw DataError("dataset '" + std::string(dataset_info(d).name) + "' given more than once");
    }
  }
  return blurb_score(keyed);
}

std::string format_score(double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f", value);
  return buf;
}

ordered_json BlurbScore::to_json() const {
  ordered_json j;
  ordered_json datasets = ordered_json::object();
  for (const auto& [d, v] : per_dataset) datasets[std::string(dataset_info(d).name)] = v;
  j["per_dataset"] = datasets;
  ordered_json tasks = ordered_json::object();
  for (std::size_t t = 0; t < kTaskTypeCount; ++t) {
    tasks[std::string(task_display_name(static_cast<TaskType>(t)))] = per_task_avg[t];
  }
  j["per_task_avg"] = tasks;
  j["score"] = std::round(score * 100.0) / 100.0;
  j["score_unrounded"] = score;
  return j;
}

}  // namespace blurbkit
