#include <algorithm>
#include <queue>
#include <unordered_map>
#include <unordered_set>

#include "blurbkit/error.hpp"
#include "blurbkit/parallel.hpp"
#include "blurbkit/unicode.hpp"
#include "blurbkit/vocab.hpp"

namespace blurbkit {

ShatterResult shatter(const WordFrequencyTable& table, std::string_view continuation_prefix) {
  if (table.empty()) throw DataError("cannot shatter an empty word-frequency table");
  ShatterResult result;
  result.words.reserve(table.size());
  std::unordered_set<std::string> alphabet;
  for (const auto& [word, count] : table.counts()) {
    SegmentedWord seg{word, count, {}};
    std::size_t pos = 0;
    while (pos < word.size()) {
      const std::size_t start = pos;
      unicode::next_code_point(word, pos);
      std::string piece;
      if (start > 0) piece.assign(continuation_prefix);
      piece.append(word, start, pos - start);
      alphabet.insert(piece);
      seg.pieces.push_back(std::move(piece));
    }
    result.words.push_back(std::move(seg));
  }
  result.alphabet.assign(alphabet.begin(), alphabet.end());
  std::sort(result.alphabet.begin(), result.alphabet.end());
  return result;
}

namespace {

using PieceId = std::int32_t;
using PairId = std::int32_t;
using u128 = unsigned __int128;

struct PairStats {
  PieceId left = 0;
  PieceId right = 0;
  std::int64_t count = 0;
  std::string merged;
  std::vector<std::int32_t> words;  // candidates; may hold stale entries
};

// Heap entry: the pair's statistics at push time.
struct Candidate {
  PairId pair;
  std::int64_t count;
  std::int64_t left_count;
  std::int64_t right_count;
};

class MergeTrainer {
 public:
  MergeTrainer(const WordFrequencyTable& table, const VocabTrainConfig& config)
      : config_(config), prefix_(config.continuation_prefix) {
    ShatterResult shattered = shatter(table, prefix_);
    alphabet_ = std::move(shattered.alphabet);
    const std::size_t floor = alphabet_.size() + kSpecialTokens.size();
    if (config_.target_size < floor) {
      throw ConfigError("target_size " + std::to_string(config_.target_size) +
                        " is below alphabet + special tokens (" + std::to_string(floor) + ")");
    }
    if (config_.min_pair_frequency < 1) throw ConfigError("min_pair_frequency must be >= 1");

    for (auto& w : shattered.words) {
      std::vector<PieceId> seg;
      seg.reserve(w.pieces.size());
      for (const auto& p : w.pieces) seg.push_back(intern(p));
      segs_.push_back(std::move(seg));
      freq_.push_back(w.count);
    }
    count_initial_pairs();
  }

  TrainResult run() {
    std::vector<std::string> tokens(kSpecialTokens.begin(), kSpecialTokens.end());
    std::unordered_set<std::string> in_vocab(tokens.begin(), tokens.end());
    for (const auto& a : alphabet_) {
      tokens.push_back(a);
      in_vocab.insert(a);
    }

    TrainResult result{Vocabulary(tokens, config_.casing, prefix_), {}, StopReason::kTargetReached,
                       alphabet_.size()};
    while (tokens.size() < config_.target_size) {
      const auto best = pop_best();
      if (!best) {
        result.stop = StopReason::kNoEligiblePair;
        break;
      }
      const PairStats& p = pairs_[static_cast<std::size_t>(*best)];
      result.merges.push_back(Merge{piece_text_[p.left], piece_text_[p.right], p.merged,
                                    score_of(*best)});
      if (in_vocab.insert(p.merged).second) tokens.push_back(p.merged);
      apply(*best);
    }
    result.vocab = Vocabulary(std::move(tokens), config_.casing, prefix_);
    return result;
  }

 private:
  bool likelihood() const { return config_.scorer == MergeScorer::kUnigramLikelihood; }

  PieceId intern(const std::string& piece) {
    auto [it, inserted] = piece_ids_.emplace(piece, static_cast<PieceId>(piece_text_.size()));
    if (inserted) {
      piece_text_.push_back(piece);
      piece_count_.push_back(0);
      pairs_of_piece_.emplace_back();
    }
    return it->second;
  }

  static std::uint64_t key(PieceId a, PieceId b) {
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) |
           static_cast<std::uint32_t>(b);
  }

  PairId pair_id(PieceId a, PieceId b) {
    auto [it, inserted] = pair_index_.emplace(key(a, b), static_cast<PairId>(pairs_.size()));
    if (inserted) {
      PairStats stats;
      stats.left = a;
      stats.right = b;
      stats.merged = merge_pieces(piece_text_[a], piece_text_[b], prefix_);
      pairs_.push_back(std::move(stats));
      pairs_of_piece_[a].push_back(it->second);
      if (b != a) pairs_of_piece_[b].push_back(it->second);
    }
    return it->second;
  }

  void count_initial_pairs() {
    // Shard-local counts reduced in shard order; the heap order is a total
    // order over pair strings, so the result does not depend on sharding.
    const std::size_t workers = std::max<std::size_t>(1, config_.workers);
    const std::size_t shards = workers * 4;
    std::vector<std::unordered_map<std::uint64_t, std::int64_t>> partial(shards);
    run_sharded(segs_.size(), shards, workers, [&](std::size_t s, std::size_t b, std::size_t e) {
      for (std::size_t w = b; w < e; ++w) {
        const auto& seg = segs_[w];
        for (std::size_t i = 0; i + 1 < seg.size(); ++i) partial[s][key(seg[i], seg[i + 1])] += freq_[w];
      }
    });
    for (std::size_t w = 0; w < segs_.size(); ++w) {
      const auto& seg = segs_[w];
      for (PieceId p : seg) piece_count_[p] += freq_[w];
      for (std::size_t i = 0; i + 1 < seg.size(); ++i) {
        auto& words = pairs_[pair_id(seg[i], seg[i + 1])].words;
        if (words.empty() || words.back() != static_cast<std::int32_t>(w)) {
          words.push_back(static_cast<std::int32_t>(w));
        }
      }
    }
    for (const auto& shard : partial) {
      for (const auto& [k, c] : shard) {
        const auto a = static_cast<PieceId>(k >> 32);
        const auto b = static_cast<PieceId>(k & 0xFFFFFFFFu);
        pairs_[pair_id(a, b)].count += c;
      }
    }
    for (PairId id = 0; id < static_cast<PairId>(pairs_.size()); ++id) push(id);
  }

  Candidate snapshot(PairId id) const {
    const auto& p = pairs_[static_cast<std::size_t>(id)];
    return Candidate{id, p.count, piece_count_[p.left], piece_count_[p.right]};
  }

  bool current(const Candidate& c) const {
    const auto& p = pairs_[static_cast<std::size_t>(c.pair)];
    if (p.count != c.count) return false;
    if (!likelihood()) return true;
    return piece_count_[p.left] == c.left_count && piece_count_[p.right] == c.right_count;
  }

  void push(PairId id) {
    const auto& p = pairs_[static_cast<std::size_t>(id)];
    if (p.count >= config_.min_pair_frequency) heap_.push(snapshot(id));
  }

  double score_of(PairId id) const {
    const auto& p = pairs_[static_cast<std::size_t>(id)];
    if (!likelihood()) return static_cast<double>(p.count);
    return static_cast<double>(p.count) /
           (static_cast<double>(piece_count_[p.left]) * static_cast<double>(piece_count_[p.right]));
  }

  // True when `a` should be merged before `b`.
  bool better(const Candidate& a, const Candidate& b) const {
    if (likelihood()) {
      // count_a / (la * ra) vs count_b / (lb * rb), compared exactly.
      const u128 lhs = static_cast<u128>(a.count) * static_cast<u128>(b.left_count) *
                       static_cast<u128>(b.right_count);
      const u128 rhs = static_cast<u128>(b.count) * static_cast<u128>(a.left_count) *
                       static_cast<u128>(a.right_count);
      if (lhs != rhs) return lhs > rhs;
    } else if (a.count != b.count) {
      return a.count > b.count;
    }
    const auto& pa = pairs_[static_cast<std::size_t>(a.pair)];
    const auto& pb = pairs_[static_cast<std::size_t>(b.pair)];
    if (pa.merged != pb.merged) return pa.merged < pb.merged;
    if (piece_text_[pa.left] != piece_text_[pb.left]) return piece_text_[pa.left] < piece_text_[pb.left];
    return piece_text_[pa.right] < piece_text_[pb.right];
  }

  std::optional<PairId> pop_best() {
    while (!heap_.empty()) {
      const Candidate top = heap_.top();
      heap_.pop();
      if (current(top)) return top.pair;
      push(top.pair);  // stale: requeue with current statistics
    }
    return std::nullopt;
  }

  void update_word(std::size_t w, int sign, std::vector<PairId>* increased) {
    const auto& seg = segs_[w];
    const std::int64_t delta = sign * freq_[w];
    for (PieceId p : seg) piece_count_[p] += delta;
    for (std::size_t i = 0; i + 1 < seg.size(); ++i) {
      const PairId id = pair_id(seg[i], seg[i + 1]);
      auto& stats = pairs_[static_cast<std::size_t>(id)];
      stats.count += delta;
      if (sign > 0) {
        if (stats.words.empty() || stats.words.back() != static_cast<std::int32_t>(w)) {
          stats.words.push_back(static_cast<std::int32_t>(w));
        }
        increased->push_back(id);
      }
    }
  }

  void apply(PairId id) {
    const PieceId left = pairs_[static_cast<std::size_t>(id)].left;
    const PieceId right = pairs_[static_cast<std::size_t>(id)].right;
    const PieceId merged = intern(pairs_[static_cast<std::size_t>(id)].merged);
    // pairs_ may grow below; work on a copy of the candidate list.
    const std::vector<std::int32_t> words = pairs_[static_cast<std::size_t>(id)].words;

    std::vector<PairId> increased;
    ++stamp_;
    if (seen_.size() < segs_.size()) seen_.resize(segs_.size(), 0);
    for (const std::int32_t w : words) {
      if (seen_[w] == stamp_) continue;
      seen_[w] = stamp_;
      auto& seg = segs_[w];
      bool present = false;
      for (std::size_t i = 0; i + 1 < seg.size() && !present; ++i) {
        present = seg[i] == left && seg[i + 1] == right;
      }
      if (!present) continue;

      update_word(w, -1, nullptr);
      std::vector<PieceId> rewritten;
      rewritten.reserve(seg.size());
      for (std::size_t i = 0; i < seg.size(); ++i) {
        if (i + 1 < seg.size() && seg[i] == left && seg[i + 1] == right) {
          rewritten.push_back(merged);
          ++i;
        } else {
          rewritten.push_back(seg[i]);
        }
      }
      seg = std::move(rewritten);
      update_word(w, +1, &increased);
    }

    std::sort(increased.begin(), increased.end());
    increased.erase(std::unique(increased.begin(), increased.end()), increased.end());
    for (PairId p : increased) push(p);
    if (likelihood()) {
      // Constituent counts of left/right dropped, raising those pairs' scores.
      for (PieceId piece : {left, right}) {
        for (PairId p : pairs_of_piece_[piece]) push(p);
      }
    }
  }

  struct HeapOrder {
    const MergeTrainer* trainer;
    bool operator()(const Candidate& a, const Candidate& b) const { return trainer->better(b, a); }
  };

  VocabTrainConfig config_;
  std::string prefix_;
  std::vector<std::string> alphabet_;

  std::vector<std::string> piece_text_;
  std::unordered_map<std::string, PieceId> piece_ids_;
  std::vector<std::int64_t> piece_count_;
  std::vector<std::vector<PairId>> pairs_of_piece_;

  std::vector<std::vector<PieceId>> segs_;
  std::vector<std::int64_t> freq_;

  std::vector<PairStats> pairs_;
  std::unordered_map<std::uint64_t, PairId> pair_index_;
  std::priority_queue<Candidate, std::vector<Candidate>, HeapOrder> heap_{HeapOrder{this}};

  std::vector<std::uint32_t> seen_;
  std::uint32_t stamp_ = 0;
};

}  // namespace

TrainResult train_vocab(const WordFrequencyTable& table, const VocabTrainConfig& config) {
  if (config.target_size == 0) throw ConfigError("target_size must be positive");
  MergeTrainer trainer(table, config);
  return trainer.run();
}

TrainResult train_bpe(const WordFrequencyTable& table, VocabTrainConfig config) {
  config.scorer = MergeScorer::kFrequency;
  return train_vocab(table, config);
}

TrainResult train_wordpiece(const WordFrequencyTable& table, VocabTrainConfig config) {
  config.scorer = MergeScorer::kUnigramLikelihood;
  return train_vocab(table, config);
}

Vocabulary replay_merges(const WordFrequencyTable& table, const MergeHistory& merges,
                         Casing casing, std::string_view continuation_prefix) {
  ShatterResult state = shatter(table, continuation_prefix);
  std::vector<std::string> tokens(kSpecialTokens.begin(), kSpecialTokens.end());
  tokens.insert(tokens.end(), state.alphabet.begin(), state.alphabet.end());
  std::unordered_set<std::string> in_vocab(tokens.begin(), tokens.end());
  for (const auto& m : merges) {
    const std::string merged = merge_pieces(m.left, m.right, continuation_prefix);
    for (auto& w : state.words) {
      auto& pieces = w.pieces;
      std::vector<std::string> out;
      out.reserve(pieces.size());
      for (std::size_t i = 0; i < pieces.size(); ++i) {
        if (i + 1 < pieces.size() && pieces[i] == m.left && pieces[i + 1] == m.right) {
          out.push_back(merged);
          ++i;
        } else {
          out.push_back(std::move(pieces[i]));
        }
      }
      pieces = std::move(out);
    }
    if (in_vocab.insert(merged).second) tokens.push_back(merged);
  }
  return Vocabulary(std::move(tokens), casing, std::string(continuation_prefix));
}

}  // namespace blurbkit
