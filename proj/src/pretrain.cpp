#include "blurbkit/pretrain.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <map>
#include <numeric>
#include <ostream>

#include <json.hpp>

#include "blurbkit/error.hpp"
#include "blurbkit/rng.hpp"

namespace blurbkit {

void MaskingSchedule::validate() const {
  if (!(start_rate >= 0.0 && start_rate <= end_rate && end_rate <= 1.0)) {
    throw ConfigError("masking schedule requires 0 <= start_rate <= end_rate <= 1");
  }
  if (!(step > 0.0) || !(progress_per_step > 0.0)) {
    throw ConfigError("masking schedule step and progress_per_step must be positive");
  }
}

double masking_rate(double progress, const MaskingSchedule& schedule) {
  schedule.validate();
  if (!(progress >= 0.0 && progress <= 1.0)) {
    throw ConfigError("progress must lie in [0, 1], got " + std::to_string(progress));
  }
  // The epsilon absorbs representation error at window boundaries
  // (0.6 / 0.2 == 2.9999999999999996 in binary floating point).
  const double windows = std::floor(progress / schedule.progress_per_step + 1e-9);
  const double rate = std::min(schedule.end_rate, schedule.start_rate + schedule.step * windows);
  return std::round(rate * 1e9) / 1e9;
}

MaskingPlan select_targets(std::span<const TokenId> ids, std::span<const std::int32_t> word_index,
                           double rate, bool wwm, std::uint64_t seed, const Vocabulary& vocab,
                           const SelectionOptions& options) {
  if (ids.size() != word_index.size()) {
    throw DataError("ids and word_index differ in length (" + std::to_string(ids.size()) + " vs " +
                    std::to_string(word_index.size()) + ")");
  }
  if (!(rate >= 0.0 && rate <= 1.0)) throw ConfigError("masking rate must lie in [0, 1]");

  const auto structural = [&](TokenId id) {
    return id == vocab.pad_id() || id == vocab.cls_id() || id == vocab.sep_id() ||
           id == vocab.mask_id();
  };

  // Units of candidate positions, in order of first appearance.
  std::vector<std::vector<std::size_t>> units;
  std::map<std::int32_t, std::size_t> unit_of_word;
  std::size_t candidates = 0;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (word_index[i] < 0 || structural(ids[i])) continue;
    ++candidates;
    if (wwm) {
      auto [it, inserted] = unit_of_word.emplace(word_index[i], units.size());
      if (inserted) units.emplace_back();
      units[it->second].push_back(i);
    } else {
      units.push_back({i});
    }
  }
  if (candidates == 0) throw DataError("sequence has no maskable (non-special) pieces");

  const auto quota = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::llround(rate * static_cast<double>(candidates))));

  Rng rng(seed);
  std::vector<std::size_t> order(units.size());
  std::iota(order.begin(), order.end(), 0);
  // Lazy Fisher-Yates over units; a unit that would overshoot the quota is
  // skipped, so selections never exceed it.
  std::vector<std::size_t> chosen;
  std::size_t selected_pieces = 0;
  for (std::size_t k = 0; k < order.size() && selected_pieces < quota; ++k) {
    const std::size_t j = k + static_cast<std::size_t>(rng.below(order.size() - k));
    std::swap(order[k], order[j]);
    const std::size_t size = units[order[k]].size();
    if (selected_pieces + size > quota) continue;
    chosen.push_back(order[k]);
    selected_pieces += size;
  }
  if (chosen.empty()) {
    chosen.push_back(order[0]);  // every unit exceeds a tiny quota
    selected_pieces = units[order[0]].size();
  }

  const auto& replacement_pool = vocab.non_special_ids();
  struct Entry {
    std::size_t position;
    MaskAction action;
    TokenId replacement;
  };
  std::vector<Entry> entries;
  entries.reserve(selected_pieces);
  for (const std::size_t unit : chosen) {
    const double u = rng.uniform();
    MaskAction action = MaskAction::kRandom;
    if (u < options.mask_probability) {
      action = MaskAction::kMask;
    } else if (u < options.mask_probability + options.keep_probability) {
      action = MaskAction::kKeep;
    }
    for (const std::size_t pos : units[unit]) {
      TokenId replacement = -1;
      if (action == MaskAction::kRandom) {
        if (replacement_pool.empty()) throw DataError("vocabulary has no non-special tokens");
        replacement = replacement_pool[static_cast<std::size_t>(rng.below(replacement_pool.size()))];
      }
      entries.push_back(Entry{pos, action, replacement});
    }
  }
  std::sort(entries.begin(), entries.end(),
            [](const Entry& a, const Entry& b) { return a.position < b.position; });

  MaskingPlan plan;
  for (const auto& e : entries) {
    plan.positions.push_back(e.position);
    plan.actions.push_back(e.action);
    plan.replacements.push_back(e.replacement);
    plan.labels.push_back(ids[e.position]);
  }
  return plan;
}

MaskingPlan select_targets(const Encoding& encoding, double rate, bool wwm, std::uint64_t seed,
                           const Vocabulary& vocab, const SelectionOptions& options) {
  return select_targets(encoding.ids, encoding.word_index, rate, wwm, seed, vocab, options);
}

MaskedSequence apply_plan(std::span<const TokenId> ids, const MaskingPlan& plan,
                          const Vocabulary& vocab) {
  const std::size_t n = plan.positions.size();
  if (plan.actions.size() != n || plan.replacements.size() != n || plan.labels.size() != n) {
    throw DataError("masking plan has inconsistent field lengths");
  }
  MaskedSequence out{std::vector<TokenId>(ids.begin(), ids.end()),
                     std::vector<TokenId>(ids.size(), kIgnoreLabel)};
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t pos = plan.positions[k];
    if (pos >= ids.size()) {
      throw DataError("masking plan position " + std::to_string(pos) +
                      " exceeds sequence length " + std::to_string(ids.size()));
    }
    if (plan.labels[k] != ids[pos]) {
      throw DataError("masking plan label mismatch at position " + std::to_string(pos));
    }
    out.labels[pos] = ids[pos];
    switch (plan.actions[k]) {
      case MaskAction::kMask:
        out.masked_ids[pos] = vocab.mask_id();
        break;
      case MaskAction::kKeep:
        break;
      case MaskAction::kRandom:
        out.masked_ids[pos] = plan.replacements[k];
        break;
    }
  }
  return out;
}

MaskedSequence apply_plan(const Encoding& encoding, const MaskingPlan& plan,
                          const Vocabulary& vocab) {
  return apply_plan(encoding.ids, plan, vocab);
}

MlmExample make_mlm_example(const Encoding& encoding, double rate, bool wwm, std::uint64_t seed,
                            const Vocabulary& vocab, std::optional<bool> is_next) {
  const MaskingPlan plan = select_targets(encoding, rate, wwm, seed, vocab);
  MaskedSequence masked = apply_plan(encoding, plan, vocab);
  return MlmExample{encoding.ids, std::move(masked.masked_ids), std::move(masked.labels),
                    encoding.segment_ids, is_next};
}

std::string to_jsonl(const MlmExample& example) {
  nlohmann::ordered_json j;
  j["ids"] = example.ids;
  j["masked_ids"] = example.masked_ids;
  j["labels"] = example.labels;
  j["segments"] = example.segments;
  if (example.is_next) j["is_next"] = *example.is_next;
  return j.dump();
}

namespace {

void put_u32(std::ostream& out, std::uint32_t v) {
  const char b[4] = {static_cast<char>(v & 0xFF), static_cast<char>((v >> 8) & 0xFF),
                     static_cast<char>((v >> 16) & 0xFF), static_cast<char>((v >> 24) & 0xFF)};
  out.write(b, 4);
}

bool get_u32(std::istream& in, std::uint32_t& v) {
  unsigned char b[4];
  if (!in.read(reinterpret_cast<char*>(b), 4)) return false;
  v = static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
      (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
  return true;
}

}  // namespace

void write_binary(std::ostream& out, const MlmExample& example) {
  const auto n = static_cast<std::uint32_t>(example.ids.size());
  put_u32(out, n);
  for (const auto* v : {&example.ids, &example.masked_ids, &example.labels}) {
    for (TokenId id : *v) put_u32(out, static_cast<std::uint32_t>(id));
  }
  out.write(reinterpret_cast<const char*>(example.segments.data()), n);
  const signed char next = example.is_next ? static_cast<signed char>(*example.is_next) : -1;
  out.put(static_cast<char>(next));
}

std::optional<MlmExample> read_binary(std::istream& in) {
  std::uint32_t n = 0;
  if (!get_u32(in, n)) return std::nullopt;
  MlmExample ex;
  for (auto* v : {&ex.ids, &ex.masked_ids, &ex.labels}) {
    v->resize(n);
    for (auto& id : *v) {
      std::uint32_t raw = 0;
      if (!get_u32(in, raw)) throw FormatError("truncated binary MLM record");
      id = static_cast<TokenId>(raw);
    }
  }
  ex.segments.resize(n);
  if (!in.read(reinterpret_cast<char*>(ex.segments.data()), n)) {
    throw FormatError("truncated binary MLM record");
  }
  const int next = in.get();
  if (next == std::char_traits<char>::eof()) throw FormatError("truncated binary MLM record");
  const auto flag = static_cast<signed char>(next);
  if (flag >= 0) ex.is_next = flag != 0;
  return ex;
}

std::vector<NspPair> build_nsp_pairs(std::span<const Document> documents, std::uint64_t seed,
                                     const NspOptions& options) {
  if (!(options.next_probability >= 0.0 && options.next_probability <= 1.0)) {
    throw ConfigError("next_probability must lie in [0, 1]");
  }
  const bool wants_random = options.next_probability < 1.0;
  if (wants_random && documents.size() < 2) {
    throw DataError("random-next pairs need at least 2 documents, corpus has " +
                    std::to_string(documents.size()));
  }
  for (std::size_t d = 0; d < documents.size(); ++d) {
    if (documents[d].sentences.empty()) {
      throw DataError("document '" + documents[d].id + "' has no sentences");
    }
  }
  std::vector<NspPair> pairs;
  for (std::size_t d = 0; d < documents.size(); ++d) {
    const std::size_t n = documents[d].sentences.size();
    if (n < 2) continue;
    Rng rng(derive_seed(seed, d));
    for (std::size_t i = 0; i + 1 < n; ++i) {
      if (!wants_random || rng.uniform() < options.next_probability) {
        pairs.push_back(NspPair{{d, i}, {d, i + 1}, true});
        continue;
      }
      std::size_t other = static_cast<std::size_t>(rng.below(documents.size() - 1));
      if (other >= d) ++other;
      const std::size_t j =
          static_cast<std::size_t>(rng.below(documents[other].sentences.size()));
      pairs.push_back(NspPair{{d, i}, {other, j}, false});
    }
  }
  return pairs;
}

}  // namespace blurbkit
