#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "blurbkit/error.hpp"
#include "blurbkit/pretrain.hpp"
#include "blurbkit/rng.hpp"
#include "synthetic_corpus.hpp"
#include "test_data.hpp"

namespace {

using namespace blurbkit;

TEST(MaskingSchedule, StepFunctionIsExact) {
  const std::vector<std::pair<double, double>> expected{
      {0.0, 0.05}, {0.2, 0.10}, {0.4, 0.15}, {0.6, 0.20}, {0.8, 0.25}, {1.0, 0.25}};
  for (const auto& [progress, rate] : expected) EXPECT_EQ(masking_rate(progress), rate) << progress;
  EXPECT_EQ(masking_rate(0.199999), 0.05);
  EXPECT_EQ(masking_rate(0.5), 0.15);
  EXPECT_THROW(masking_rate(1.5), ConfigError);
  EXPECT_THROW(masking_rate(-0.1), ConfigError);
  MaskingSchedule bad;
  bad.start_rate = 0.3;
  EXPECT_THROW(masking_rate(0.5, bad), ConfigError);
}

TEST(Rng, KnownSequenceAndBounds) {
  Rng a(42), b(42), c(43);
  const auto x = a.next();
  EXPECT_EQ(x, b.next());
  EXPECT_NE(x, c.next());
  Rng r(1);
  for (int i = 0; i < 1000; ++i) {
    EXPECT_LT(r.below(7), 7u);
    const double u = r.uniform();
    EXPECT_GE(u, 0.0);
    EXPECT_LT(u, 1.0);
  }
  EXPECT_NE(derive_seed(1, 0), derive_seed(1, 1));
  EXPECT_NE(derive_seed(1, 0), derive_seed(2, 0));
}

class MaskingTest : public ::testing::Test {
 protected:
  Tokenizer tok = fixture::bert_tokenizer(128);
  const Vocabulary& vocab = tok.vocab();
};

TEST_F(MaskingTest, NeverSelectsSpecialsAndRespectsQuota) {
  const Encoding enc = tok.encode_pair("naloxone reverses opioid toxicity", "lidocaine is given");
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const auto plan = select_targets(enc, 0.15, false, seed, vocab);
    std::size_t candidates = 0;
    for (auto w : enc.word_index) candidates += w >= 0;
    EXPECT_EQ(plan.size(), std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(0.15 * candidates))));
    for (auto pos : plan.positions) {
      EXPECT_GE(enc.word_index[pos], 0);
      EXPECT_FALSE(vocab.is_special(enc.ids[pos]));
    }
    EXPECT_TRUE(std::is_sorted(plan.positions.begin(), plan.positions.end()));
  }
}

TEST_F(MaskingTest, WholeWordMaskingIsAtomic) {
  const Encoding enc = tok.encode("naloxone acetyltransferase chloramphenicol oropharyngeal insulin");
  for (std::uint64_t seed = 0; seed < 300; ++seed) {
    const auto plan = select_targets(enc, 0.25, true, seed, vocab);
    std::map<std::int32_t, std::set<MaskAction>> actions;
    std::set<std::size_t> chosen(plan.positions.begin(), plan.positions.end());
    for (std::size_t k = 0; k < plan.size(); ++k) {
      actions[enc.word_index[plan.positions[k]]].insert(plan.actions[k]);
    }
    for (const auto& [word, acts] : actions) {
      EXPECT_EQ(acts.size(), 1u);
      for (std::size_t i = 0; i < enc.size(); ++i) {
        if (enc.word_index[i] == word) EXPECT_TRUE(chosen.contains(i)) << "seed " << seed;
      }
    }
  }
}

TEST_F(MaskingTest, ApplyPlanProducesLabelsAndReplacements) {
  const Encoding enc = tok.encode("insulin lowers glucose in diabetes");
  const auto plan = select_targets(enc, 1.0, false, 9, vocab);
  const auto masked = apply_plan(enc, plan, vocab);
  for (std::size_t k = 0; k < plan.size(); ++k) {
    const auto pos = plan.positions[k];
    EXPECT_EQ(masked.labels[pos], enc.ids[pos]);
    switch (plan.actions[k]) {
      case MaskAction::kMask: EXPECT_EQ(masked.masked_ids[pos], vocab.mask_id()); break;
      case MaskAction::kKeep: EXPECT_EQ(masked.masked_ids[pos], enc.ids[pos]); break;
      case MaskAction::kRandom:
        EXPECT_EQ(masked.masked_ids[pos], plan.replacements[k]);
        EXPECT_FALSE(vocab.is_special(plan.replacements[k]));
        break;
    }
  }
  EXPECT_EQ(masked.labels.front(), kIgnoreLabel);
  EXPECT_EQ(masked.labels.back(), kIgnoreLabel);
}

TEST_F(MaskingTest, FixedSeedIsDeterministic) {
  const Encoding enc = tok.encode("naloxone reverses opioid induced respiratory depression");
  EXPECT_EQ(select_targets(enc, 0.15, true, 77, vocab), select_targets(enc, 0.15, true, 77, vocab));
  const auto a = to_jsonl(make_mlm_example(enc, 0.15, true, 5, vocab, true));
  const auto b = to_jsonl(make_mlm_example(enc, 0.15, true, 5, vocab, true));
  EXPECT_EQ(a, b);
}

TEST_F(MaskingTest, ActionSplitOverManyExamples) {
  const auto texts = fixture::synthetic_abstracts(400, 21, 60);
  std::map<MaskAction, std::size_t> counts;
  std::size_t selected = 0;
  std::size_t candidates = 0;
  std::uint64_t seed = 0;
  for (const auto& t : texts) {
    const Encoding enc = tok.encode(t);
    const auto plan = select_targets(enc, 0.15, true, derive_seed(3, seed++), vocab);
    for (auto a : plan.actions) ++counts[a];
    selected += plan.size();
    for (auto w : enc.word_index) candidates += w >= 0;
  }
  const double n = static_cast<double>(selected);
  EXPECT_NEAR(static_cast<double>(selected) / static_cast<double>(candidates), 0.15, 0.005);
  EXPECT_NEAR(counts[MaskAction::kMask] / n, 0.80, 0.02);
  EXPECT_NEAR(counts[MaskAction::kKeep] / n, 0.10, 0.02);
  EXPECT_NEAR(counts[MaskAction::kRandom] / n, 0.10, 0.02);
}

TEST_F(MaskingTest, ErrorsOnBadInput) {
  const Encoding empty = tok.encode("");
  EXPECT_THROW(select_targets(empty, 0.15, false, 1, vocab), DataError);
  const Encoding enc = tok.encode("insulin");
  EXPECT_THROW(select_targets(enc, 1.5, false, 1, vocab), ConfigError);
  MaskingPlan plan = select_targets(enc, 0.15, false, 1, vocab);
  plan.labels[0] += 1;
  EXPECT_THROW(apply_plan(enc, plan, vocab), DataError);
}

TEST_F(MaskingTest, BinaryRoundTrip) {
  const Encoding enc = tok.encode_pair("insulin dose", "glucose levels");
  std::stringstream buf;
  const auto a = make_mlm_example(enc, 0.15, false, 1, vocab, false);
  const auto b = make_mlm_example(enc, 0.15, false, 2, vocab);
  write_binary(buf, a);
  write_binary(buf, b);
  EXPECT_EQ(read_binary(buf), a);
  EXPECT_EQ(read_binary(buf), b);
  EXPECT_FALSE(read_binary(buf).has_value());
}

std::vector<Document> docs(std::size_t n) {
  std::vector<Document> out;
  const auto texts = fixture::synthetic_abstracts(n, 8, 40);
  for (std::size_t i = 0; i < n; ++i) out.push_back(make_document(std::to_string(i), texts[i]));
  return out;
}

TEST(Nsp, PairsAreValidAndBalanced) {
  const auto d = docs(300);
  const auto pairs = build_nsp_pairs(d, 4);
  std::size_t positives = 0;
  for (const auto& p : pairs) {
    if (p.is_next) {
      ++positives;
      EXPECT_EQ(p.first.document, p.second.document);
      EXPECT_EQ(p.first.sentence + 1, p.second.sentence);
    } else {
      EXPECT_NE(p.first.document, p.second.document);
      EXPECT_LT(p.second.sentence, d[p.second.document].sentences.size());
    }
  }
  EXPECT_NEAR(static_cast<double>(positives) / pairs.size(), 0.5, 0.06);
  EXPECT_EQ(pairs, build_nsp_pairs(d, 4));
  EXPECT_NE(pairs, build_nsp_pairs(d, 5));
}

TEST(Nsp, TrueOnlyModeAndSingleDocument) {
  const auto d = docs(1);
  NspOptions options;
  options.next_probability = 1.0;
  for (const auto& p : build_nsp_pairs(d, 1, options)) EXPECT_TRUE(p.is_next);
  EXPECT_THROW(build_nsp_pairs(d, 1), DataError);
}

}  // namespace
