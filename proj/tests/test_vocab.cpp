#include <gtest/gtest.h>

#include <fstream>
#include <string>
#include <vector>

#include "blurbkit/error.hpp"
#include "blurbkit/io.hpp"
#include "blurbkit/vocab.hpp"
#include "test_data.hpp"

namespace {

using namespace blurbkit;

TEST(Vocabulary, BertFixtureSpecialIds) {
  const auto& v = *fixture::bert_vocab();
  EXPECT_EQ(v.size(), 30522u);
  EXPECT_EQ(v.pad_id(), 0);
  EXPECT_EQ(v.unk_id(), 100);
  EXPECT_EQ(v.cls_id(), 101);
  EXPECT_EQ(v.sep_id(), 102);
  EXPECT_EQ(v.mask_id(), 103);
  EXPECT_FALSE(v.has_canonical_special_layout());
  EXPECT_EQ(v.non_special_ids().size(), 30522u - 5u);
  EXPECT_TRUE(v.is_continuation("##lo"));
  EXPECT_EQ(v.id("insulin"), v.find("insulin").value_or(-2));
  EXPECT_FALSE(v.contains("naloxone"));
}

TEST(Vocabulary, RejectsMissingSpecialsAndDuplicates) {
  EXPECT_THROW(Vocabulary({"[PAD]", "[UNK]", "a"}, Casing::kUncased, "##"), FormatError);
  EXPECT_THROW(Vocabulary({"[PAD]", "[UNK]", "[CLS]", "[SEP]", "[MASK]", "a", "a"},
                          Casing::kUncased, "##"),
               FormatError);
  const Vocabulary v({"[PAD]", "[UNK]", "[CLS]", "[SEP]", "[MASK]", "a"}, Casing::kUncased, "##");
  EXPECT_TRUE(v.has_canonical_special_layout());
  EXPECT_THROW(v.token(6), DataError);
  EXPECT_THROW(v.id("zzz"), DataError);
}

TEST(Vocabulary, SaveLoadRoundTrip) {
  fixture::TempDir dir;
  const Vocabulary v({"[PAD]", "[UNK]", "[CLS]", "[SEP]", "[MASK]", "a", "##b", "ab"},
                     Casing::kCased, "##");
  save_vocab(v, dir / "vocab.txt");
  EXPECT_EQ(load_vocab(dir / "vocab.txt", Casing::kCased), v);
  EXPECT_EQ(io::read_file(dir / "vocab.txt"), "[PAD]\n[UNK]\n[CLS]\n[SEP]\n[MASK]\na\n##b\nab\n");
}

TEST(Vocabulary, DuplicateLineReportsLineNumbers) {
  fixture::TempDir dir;
  io::write_file_atomic(dir / "v.txt", "[PAD]\n[UNK]\n[CLS]\n[SEP]\n[MASK]\nx\ny\nx\n");
  try {
    load_vocab(dir / "v.txt");
    FAIL() << "expected FormatError";
  } catch (const FormatError& e) {
    EXPECT_NE(std::string(e.what()).find(":8: duplicate token 'x' (first on line 6)"),
              std::string::npos)
        << e.what();
  }
}

TEST(Vocabulary, WithAddedTokensAppendsOnlyAbsent) {
  const Vocabulary v({"[PAD]", "[UNK]", "[CLS]", "[SEP]", "[MASK]", "a"}, Casing::kUncased, "##");
  const auto w = v.with_added_tokens(std::vector<std::string>{"a", "<e1>", "<e1>", "$drug"});
  EXPECT_EQ(w.size(), 8u);
  EXPECT_EQ(w.token(6), "<e1>");
  EXPECT_EQ(w.token(7), "$drug");
}

TEST(Merges, MergePiecesKeepsLeftStatus) {
  EXPECT_EQ(merge_pieces("a", "##b", "##"), "ab");
  EXPECT_EQ(merge_pieces("##a", "##b", "##"), "##ab");
}

TEST(Merges, FileRoundTrip) {
  fixture::TempDir dir;
  const MergeHistory merges{{"a", "##b", "ab", 12.0}, {"##c", "##d", "##cd", 0.125}};
  save_merges(merges, dir / "merges.txt");
  EXPECT_EQ(load_merges(dir / "merges.txt"), merges);
  io::write_file_atomic(dir / "bad.txt", "a\t##b\n");
  EXPECT_THROW(load_merges(dir / "bad.txt"), FormatError);
}

TEST(Scorer, Parse) {
  EXPECT_EQ(parse_scorer("frequency"), MergeScorer::kFrequency);
  EXPECT_EQ(parse_scorer("unigram_likelihood"), MergeScorer::kUnigramLikelihood);
  EXPECT_THROW(parse_scorer("magic"), ConfigError);
}

}  // namespace
