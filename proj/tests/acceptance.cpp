// One PASS/FAIL line per acceptance criterion; exit status is the number of
// failures.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <exception>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "bert_compare.hpp"
#include "blurbkit/analysis.hpp"
#include "blurbkit/datasets.hpp"
#include "blurbkit/error.hpp"
#include "blurbkit/metrics.hpp"
#include "blurbkit/pretrain.hpp"
#include "blurbkit/rng.hpp"
#include "blurbkit/tagging.hpp"
#include "blurbkit/taskprep.hpp"
#include "blurbkit/tokenizer.hpp"
#include "blurbkit/vocab.hpp"
#include "merge_oracle.hpp"
#include "synthetic_corpus.hpp"
#include "test_data.hpp"

namespace {

using namespace blurbkit;
using Clock = std::chrono::steady_clock;

// Collects the first few mismatches of a criterion.
class Check {
 public:
  void expect(bool ok, const std::string& what) {
    if (ok) return;
    ++failures_;
    if (failures_ <= 3) notes_ += (notes_.empty() ? "" : "; ") + what;
  }
  void note(const std::string& detail) { detail_ = detail; }
  bool ok() const { return failures_ == 0; }
  std::string summary() const {
    if (ok()) return detail_;
    return std::to_string(failures_) + " mismatch(es): " + notes_;
  }

 private:
  std::size_t failures_ = 0;
  std::string notes_;
  std::string detail_;
};

int run(int number, const std::string& name, double budget_seconds,
        const std::function<void(Check&)>& body) {
  Check check;
  const auto start = Clock::now();
  try {
    body(check);
  } catch (const std::exception& e) {
    check.expect(false, std::string("exception: ") + e.what());
  }
  const double seconds = std::chrono::duration<double>(Clock::now() - start).count();
  char timing[64];
  std::snprintf(timing, sizeof timing, "%.2fs", seconds);
  if (seconds > budget_seconds) {
    check.expect(false, std::string("runtime ") + timing + " over budget");
  }
  std::printf("%s  %2d  %-34s %s [%s]\n", check.ok() ? "PASS" : "FAIL", number, name.c_str(),
              check.summary().c_str(), timing);
  std::fflush(stdout);
  return check.ok() ? 0 : 1;
}

std::string fmt(double v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::size_t workers() { return std::max(1u, std::thread::hardware_concurrency()); }

// ---- 1 ---------------------------------------------------------------------

void blurb_columns(Check& c) {
  for (const auto& col : fixture::kBertCompare) {
    std::map<Dataset, double> scores;
    for (std::size_t i = 0; i < kDatasetCount; ++i) {
      scores[blurb_datasets()[i].dataset] = col.scores[i];
    }
    const std::string got = format_score(blurb_score(scores).score);
    c.expect(got == format_score(col.published),
             std::string(col.model) + " " + got + " != " + format_score(col.published));
  }
  c.note("PubMedBERT 81.16, BioBERT 80.34 (+7 other columns)");
}

// ---- 2 ---------------------------------------------------------------------

void fragmentation(Check& c) {
  const auto vocab = std::make_shared<const Vocabulary>(
      load_vocab(fixture::data_path("bert-base-uncased-vocab.txt")));
  const Tokenizer tok(vocab, TokenizerConfig{});
  using Pieces = std::vector<std::string>;
  c.expect(tok.tokenize("naloxone").pieces == Pieces{"na", "##lo", "##xon", "##e"}, "naloxone");
  c.expect(tok.tokenize("acetyltransferase").pieces ==
               Pieces{"ace", "##ty", "##lt", "##ran", "##sf", "##eras", "##e"},
           "acetyltransferase");
  const auto report = fragmentation_report(tok, probe_terms());
  // BERT keeps the first six probe terms whole and shatters the rest.
  for (std::size_t i = 0; i < report.terms.size(); ++i) {
    c.expect(report.terms[i].whole == (i < 6), report.terms[i].term);
  }
  c.note(std::to_string(report.whole_count) + "/17 whole, mean " +
         fmt(report.mean_piece_count, 2) + " pieces");
}

// ---- 3 ---------------------------------------------------------------------

void tokenizer_golden(Check& c) {
  const auto tok = fixture::bert_tokenizer();
  std::ifstream in(fixture::data_path("tokenizer_golden.jsonl"));
  c.expect(static_cast<bool>(in), "golden fixture missing");
  std::string line;
  std::size_t records = 0;
  std::size_t mismatches = 0;
  while (std::getline(in, line)) {
    const auto j = nlohmann::json::parse(line);
    const auto enc = tok.encode(j.at("text").get<std::string>());
    const bool same = enc.ids == j.at("ids").get<std::vector<TokenId>>();
    mismatches += !same;
    c.expect(same, "record " + j.at("id").dump());
    ++records;
  }
  c.expect(records == 100, "expected 100 records, got " + std::to_string(records));
  c.note(std::to_string(records) + " sentences, " + std::to_string(mismatches) + " mismatches");
}

// ---- 4 ---------------------------------------------------------------------

std::map<std::string, std::int64_t> random_corpus(std::uint64_t seed) {
  Rng rng(seed);
  std::map<std::string, std::int64_t> words;
  const std::size_t distinct = 5 + rng.below(46);
  const std::size_t alphabet = 3 + rng.below(6);
  while (words.size() < distinct) {
    std::string w;
    const std::size_t len = 1 + rng.below(7);
    for (std::size_t i = 0; i < len; ++i) w.push_back(static_cast<char>('a' + rng.below(alphabet)));
    words[w] = static_cast<std::int64_t>(1 + rng.below(25));
  }
  return words;
}

WordFrequencyTable table_of(const std::map<std::string, std::int64_t>& words) {
  WordFrequencyTable t;
  for (const auto& [w, n] : words) t.add(w, n);
  return t;
}

void oracle_equivalence(Check& c) {
  std::size_t merges = 0;
  for (std::uint64_t seed = 1; seed <= 25; ++seed) {
    const auto words = random_corpus(1000 + seed);
    for (bool likelihood : {false, true}) {
      VocabTrainConfig config;
      config.target_size = 20 + Rng(seed * 7919).below(80);
      const auto table = table_of(words);
      const auto got = likelihood ? train_wordpiece(table, config) : train_bpe(table, config);
      const auto want = oracle::brute_force_train(words, config.target_size, likelihood);
      bool same = got.vocab.tokens() == want.tokens && got.merges.size() == want.merges.size();
      for (std::size_t i = 0; same && i < want.merges.size(); ++i) {
        same = got.merges[i].left == want.merges[i].left &&
               got.merges[i].right == want.merges[i].right &&
               got.merges[i].merged == want.merges[i].merged;
      }
      merges += want.merges.size();
      c.expect(same, (likelihood ? "wordpiece" : "bpe") + std::string(" seed ") +
                         std::to_string(seed));
    }
  }
  const auto table = table_of({{"the", 10}, {"xq", 3}});
  VocabTrainConfig config;
  config.target_size = 11;
  const auto bpe = train_bpe(table, config);
  const auto wp = train_wordpiece(table, config);
  const bool diverge = !bpe.merges.empty() && !wp.merges.empty() &&
                       bpe.merges[0].merged != wp.merges[0].merged;
  c.expect(diverge, "scorers chose the same first merge");
  c.note("25 corpora x 2 scorers, " + std::to_string(merges) + " merges; first merge bpe=" +
         (bpe.merges.empty() ? "-" : bpe.merges[0].merged) +
         " wordpiece=" + (wp.merges.empty() ? "-" : wp.merges[0].merged));
}

// ---- 5 ---------------------------------------------------------------------

void in_domain_vocab(Check& c) {
  const auto train_texts = fixture::synthetic_abstracts(5000, 11);
  const auto held_out = fixture::synthetic_abstracts(500, 12);
  VocabTrainConfig config;
  config.target_size = 8000;
  config.scorer = MergeScorer::kUnigramLikelihood;
  config.workers = workers();
  const auto table = build_word_frequencies(train_texts, Casing::kUncased, config.workers);
  const auto trained = train_vocab(table, config);
  const Tokenizer domain(std::make_shared<const Vocabulary>(trained.vocab), TokenizerConfig{});
  const auto bert = fixture::bert_tokenizer();

  const auto cmp = compare_vocabs(bert, domain, probe_terms(), held_out, "bert", "in-domain");
  c.expect(cmp.length_b.mean < cmp.length_a.mean,
           "in-domain mean " + fmt(cmp.length_b.mean) + " >= bert " + fmt(cmp.length_a.mean));
  c.expect(cmp.fragmentation_b.whole_count >= 10,
           "only " + std::to_string(cmp.fragmentation_b.whole_count) + "/17 terms whole");
  c.note("vocab " + std::to_string(trained.vocab.size()) + ", pieces/record " +
         fmt(cmp.length_b.mean, 2) + " vs bert " + fmt(cmp.length_a.mean, 2) + ", whole " +
         std::to_string(cmp.fragmentation_b.whole_count) + "/17 vs " +
         std::to_string(cmp.fragmentation_a.whole_count) + "/17");
}

// ---- 6 ---------------------------------------------------------------------

struct MaskingStats {
  std::size_t candidates = 0;
  std::size_t selected = 0;
  std::array<std::size_t, 3> actions{};
  std::size_t wwm_violations = 0;
  std::size_t special_selections = 0;
  std::string bytes;
};

std::vector<Encoding> masking_inputs(const Tokenizer& tok, std::size_t n) {
  std::vector<Encoding> out;
  out.reserve(n);
  const auto texts = fixture::synthetic_abstracts(n, 21, 40);
  for (const auto& t : texts) out.push_back(tok.encode(t, 128));
  return out;
}

MaskingStats masking_run(const std::vector<Encoding>& inputs, const Vocabulary& vocab, bool wwm,
                         std::uint64_t seed) {
  MaskingStats s;
  std::ostringstream bytes;
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    const auto& enc = inputs[i];
    const auto plan = select_targets(enc, 0.15, wwm, derive_seed(seed, i), vocab);
    for (std::size_t p = 0; p < enc.size(); ++p) {
      s.candidates += enc.word_index[p] >= 0 && !vocab.is_special(enc.ids[p]) ? 1 : 0;
    }
    s.selected += plan.size();
    std::map<std::int32_t, std::set<MaskAction>> word_actions;
    std::map<std::int32_t, std::size_t> word_selected;
    for (std::size_t k = 0; k < plan.size(); ++k) {
      const std::size_t pos = plan.positions[k];
      ++s.actions[static_cast<std::size_t>(plan.actions[k])];
      if (enc.word_index[pos] < 0 || vocab.is_special(enc.ids[pos])) ++s.special_selections;
      word_actions[enc.word_index[pos]].insert(plan.actions[k]);
      ++word_selected[enc.word_index[pos]];
    }
    if (wwm) {
      for (const auto& [w, n] : word_selected) {
        const auto pieces = static_cast<std::size_t>(
            std::count(enc.word_index.begin(), enc.word_index.end(), w));
        if (n != pieces || word_actions[w].size() != 1) ++s.wwm_violations;
      }
    }
    write_binary(bytes, make_mlm_example(enc, 0.15, wwm, derive_seed(seed, i), vocab));
  }
  s.bytes = bytes.str();
  return s;
}

void masking_statistics(Check& c) {
  const auto tok = fixture::bert_tokenizer();
  const auto inputs = masking_inputs(tok, 10000);
  std::string detail;
  for (bool wwm : {false, true}) {
    const auto a = masking_run(inputs, tok.vocab(), wwm, 5);
    const auto b = masking_run(inputs, tok.vocab(), wwm, 5);
    const std::string mode = wwm ? "wwm" : "piece";
    const double rate = static_cast<double>(a.selected) / static_cast<double>(a.candidates);
    c.expect(std::abs(rate - 0.15) <= 0.005, mode + " rate " + fmt(rate));
    const std::array<double, 3> want{0.80, 0.10, 0.10};
    std::string split;
    for (std::size_t k = 0; k < 3; ++k) {
      const double got = static_cast<double>(a.actions[k]) / static_cast<double>(a.selected);
      c.expect(std::abs(got - want[k]) <= 0.01, mode + " action " + std::to_string(k) + " " + fmt(got));
      split += (k ? "/" : "") + fmt(got, 3);
    }
    c.expect(a.wwm_violations == 0, mode + " wwm violations " + std::to_string(a.wwm_violations));
    c.expect(a.special_selections == 0, mode + " special selections");
    c.expect(a.bytes == b.bytes, mode + " outputs differ between runs");
    detail += (detail.empty() ? "" : "; ") + mode + " rate " + fmt(rate) + " split " + split;
  }
  c.note(std::to_string(inputs.size()) + " examples, " + detail +
         ", 0 wwm violations, 0 specials, byte-identical reruns");
}

// ---- 7 ---------------------------------------------------------------------

void masking_schedule(Check& c) {
  const std::vector<std::pair<double, double>> table{{0.0, 0.05}, {0.2, 0.10}, {0.4, 0.15},
                                                     {0.6, 0.20}, {0.8, 0.25}, {1.0, 0.25}};
  for (const auto& [progress, rate] : table) {
    c.expect(masking_rate(progress) == rate, "progress " + fmt(progress, 1));
  }
  c.expect(masking_rate(0.19) == 0.05 && masking_rate(0.39) == 0.10, "between steps");
  c.note("6/6 schedule points exact");
}

// ---- 8 ---------------------------------------------------------------------

std::vector<EntitySpan> random_spans(Rng& rng, std::size_t n_words, bool adjacency_free) {
  static const std::vector<std::string> types{"DISEASE", "CHEMICAL", "GENE"};
  std::vector<EntitySpan> spans;
  std::size_t w = 0;
  while (w < n_words) {
    if (rng.below(3) == 0) {
      const std::size_t len = 1 + rng.below(std::min<std::uint64_t>(4, n_words - w));
      spans.push_back({w, w + len - 1, types[rng.below(types.size())]});
      w += len + (adjacency_free ? 1 : 0);
    } else {
      ++w;
    }
  }
  return spans;
}

void tagging_suite(Check& c) {
  Rng rng(8);
  for (int i = 0; i < 1000; ++i) {
    const std::size_t n = 1 + rng.below(30);
    const auto spans = random_spans(rng, n, false);
    for (auto scheme : {TagScheme::kBIO, TagScheme::kBIOUL}) {
      c.expect(tags_to_spans(spans_to_tags(spans, n, scheme)) == spans,
               "round trip " + std::string(to_string(scheme)) + " case " + std::to_string(i));
    }
    const auto free = random_spans(rng, n, true);
    c.expect(tags_to_spans(spans_to_tags(free, n, TagScheme::kIO)) == free,
             "round trip io case " + std::to_string(i));
    const auto bio = spans_to_tags(spans, n, TagScheme::kBIO);
    const auto bioul = convert_scheme(bio, TagScheme::kBIOUL);
    c.expect(tags_to_spans(bioul.tags) == spans && convert_scheme(bioul.tags, TagScheme::kBIO).tags == bio,
             "bio<->bioul case " + std::to_string(i));
  }
  using Tags = std::vector<std::string>;
  const std::vector<std::pair<Tags, std::vector<EntitySpan>>> repair{
      {{"I-D", "O"}, {{0, 0, "D"}}},
      {{"O", "I-D", "I-D"}, {{1, 2, "D"}}},
      {{"B-D", "I-C"}, {{0, 0, "D"}, {1, 1, "C"}}},
      {{"I-D", "I-D", "B-D"}, {{0, 1, "D"}, {2, 2, "D"}}},
      {{"B-D", "O", "I-D"}, {{0, 0, "D"}, {2, 2, "D"}}},
      {{"I-C", "I-D"}, {{0, 0, "C"}, {1, 1, "D"}}},
      {{"B-D", "I-D", "I-D"}, {{0, 2, "D"}}},
      {{"O", "O"}, {}},
  };
  for (std::size_t i = 0; i < repair.size(); ++i) {
    c.expect(tags_to_spans(TagSequence{TagScheme::kBIO, repair[i].first}, RepairMode::kConll) ==
                 repair[i].second,
             "repair case " + std::to_string(i));
  }
  c.note("1000 span sets x BIO/BIOUL/IO, BIO<->BIOUL lossless, 8/8 repair cases");
}

// ---- 9 ---------------------------------------------------------------------

bool near(double a, double b) { return std::abs(a - b) <= 1e-6; }

void metrics_suite(Check& c) {
  const std::vector<EntitySpan> gold{{0, 1, "D"}, {3, 3, "C"}};
  const std::vector<EntitySpan> half{{0, 1, "D"}};
  c.expect(near(entity_f1(gold, half).value, 2.0 / 3.0), "entity_f1 P=1 R=0.5");
  c.expect(near(entity_f1(gold, gold).value, 1.0), "entity_f1 identical");

  const auto pico = [](std::vector<bool> p, std::vector<bool> i, std::vector<bool> o) {
    return PicoLabels{{std::move(p), std::move(i), std::move(o)}};
  };
  const std::vector<PicoLabels> pg{pico({1, 1, 0, 0, 0}, {0, 0, 1, 0, 0}, {0, 0, 0, 1, 1}),
                                   pico({0, 0, 0, 0}, {1, 1, 0, 0}, {0, 0, 1, 1}),
                                   pico({1, 1, 1}, {0, 0, 0}, {0, 1, 0})};
  const std::vector<PicoLabels> pp{pico({1, 0, 0, 0, 1}, {0, 0, 1, 0, 0}, {0, 0, 0, 1, 0}),
                                   pico({1, 0, 0, 0}, {1, 1, 1, 0}, {0, 0, 0, 0}),
                                   pico({1, 1, 0}, {0, 0, 0}, {0, 1, 0})};
  c.expect(near(word_macro_f1_pico(pg, pp).value, 71.0 / 105.0), "word_macro_f1_pico");

  const std::vector<std::string> g{"CPR:3", "CPR:3", "CPR:4", "CPR:4", "CPR:5", "CPR:6",
                                   "CPR:9", "false", "false", "false", "false", "CPR:9"};
  const std::vector<std::string> p{"CPR:3", "CPR:4", "CPR:4", "false", "CPR:5", "CPR:6",
                                   "CPR:5", "false", "CPR:3", "false", "false", "CPR:9"};
  c.expect(near(micro_f1(g, p, "false").value, 0.625), "micro_f1 filtered");
  c.expect(near(micro_f1(g, p).value, 2.0 / 3.0), "micro_f1 unfiltered");
  c.expect(near(accuracy(g, p).value, 8.0 / 12.0), "accuracy");

  const std::vector<double> x{1, 2, 3};
  const double r = pearson(x, std::vector<double>{2, 4, 7}).value;
  c.expect(near(r, 0.9933992677987828), "pearson " + fmt(r, 6));
  c.note("entity 2/3, pico 71/105, micro 0.625 | 0.6667, pearson " + fmt(r, 6));
}

// ---- 10 --------------------------------------------------------------------

RelationSentence relation_sentence(const std::string& id, std::size_t chemicals,
                                   std::size_t proteins) {
  RelationSentence s{id, {}, {}, {}};
  for (std::size_t i = 0; i < chemicals + proteins; ++i) s.words.push_back("w" + std::to_string(i));
  for (std::size_t i = 0; i < chemicals; ++i) {
    s.chemicals.push_back({"c" + std::to_string(i), {i, i, "CHEMICAL"}});
  }
  for (std::size_t i = 0; i < proteins; ++i) {
    s.proteins.push_back({"p" + std::to_string(i), {chemicals + i, chemicals + i, "GENE"}});
  }
  return s;
}

RelationInstance labeled_pair(const RelationSentence& s, std::size_t c, std::size_t p) {
  return RelationInstance{s.id + ".x", s.words, s.chemicals[c].span, s.proteins[p].span, "CPR:4"};
}

void negative_expansion(Check& c) {
  const std::vector<RelationSentence> two{relation_sentence("s", 2, 2)};
  const std::vector<RelationInstance> one{labeled_pair(two[0], 0, 1)};
  const auto out = expand_negatives(two, one);
  c.expect(out.size() == 4, "2x2 with one labeled gave " + std::to_string(out.size()));
  Rng rng(10);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<RelationSentence> sents;
    std::vector<RelationInstance> labeled;
    std::size_t cross = 0;
    const std::size_t n = 1 + rng.below(6);
    for (std::size_t s = 0; s < n; ++s) {
      sents.push_back(relation_sentence("s" + std::to_string(s), rng.below(5), rng.below(5)));
      const auto& st = sents.back();
      cross += st.chemicals.size() * st.proteins.size();
      for (std::size_t ci = 0; ci < st.chemicals.size(); ++ci) {
        for (std::size_t pi = 0; pi < st.proteins.size(); ++pi) {
          if (rng.below(4) == 0) labeled.push_back(labeled_pair(st, ci, pi));
        }
      }
    }
    // |labeled| + sum |C_s| x |P_s| - |labeled pairs inside the cross product|
    const std::size_t want = labeled.size() + cross - labeled.size();
    c.expect(expand_negatives(sents, labeled).size() == want, "trial " + std::to_string(trial));
  }
  c.note("2x2-1 -> 4, 200 random sentence sets match |L| + sum|C||P| - |L|");
}

// ---- 11 --------------------------------------------------------------------

std::string adversarial_text(Rng& rng, std::size_t words) {
  // Mixes shattering words, CJK (one piece per character), digits and
  // punctuation runs so every word yields several pieces.
  static const std::vector<std::string> parts{
      "acetyltransferase", "\xe8\x9b\x8b\xe7\x99\xbd\xe8\xb4\xa8", "1234567890",
      "!!?((", "naloxone", "oropharyngeal", "x", "chloramphenicol-induced"};
  std::string out;
  for (std::size_t i = 0; i < words; ++i) {
    if (i) out += ' ';
    out += parts[rng.below(parts.size())];
  }
  return out;
}

std::vector<std::string> split_words(const std::string& text) {
  std::istringstream in(text);
  std::vector<std::string> words;
  for (std::string w; in >> w;) words.push_back(w);
  return words;
}

void truncation_contract(Check& c) {
  const auto bert = fixture::bert_tokenizer(100000);
  const std::vector<std::string> types{"CHEMICAL", "GENE", "DRUG", "DISEASE"};
  std::vector<std::string> reserved;
  for (auto mode : {RelationMode::kDummify, RelationMode::kMarkers}) {
    for (auto& t : reserved_tokens(mode, types)) reserved.push_back(t);
  }
  const Tokenizer tok = with_reserved_tokens(bert, reserved);
  Rng rng(11);
  std::map<Dataset, std::size_t> longest;
  std::size_t encodings = 0;
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t n = 200 + rng.below(3000);
    const auto words = split_words(adversarial_text(rng, n));
    // Entities near the start, in the middle and at the very end.
    const std::size_t a = rng.below(words.size() - 1);
    const std::size_t b = a + 1 + rng.below(words.size() - a - 1);
    const RelationInstance rel{"r" + std::to_string(trial), words, {a, a, "CHEMICAL"},
                               {b, b, "GENE"}, "false"};
    for (auto dataset : {Dataset::kGAD, Dataset::kChemProt, Dataset::kDDI}) {
      for (auto mode : {RelationMode::kDummify, RelationMode::kMarkers, RelationMode::kOriginal}) {
        PrepConfig config;
        config.relation_mode = mode;
        const auto prepared = prepare_task_encoding(dataset, rel, tok, config);
        const std::size_t limit = *dataset_info(dataset).max_len;
        c.expect(prepared.encoding.size() <= limit,
                 std::string(dataset_info(dataset).name) + " " +
                     std::to_string(prepared.encoding.size()));
        longest[dataset] = std::max(longest[dataset], prepared.encoding.size());
        ++encodings;
      }
    }
    const QaRecord qa{"q" + std::to_string(trial), adversarial_text(rng, 1 + rng.below(2000)),
                      adversarial_text(rng, 1 + rng.below(4000)), "yes"};
    for (auto dataset : {Dataset::kPubMedQA, Dataset::kBioASQ}) {
      const auto prepared = prepare_task_encoding(dataset, qa, tok, PrepConfig{});
      c.expect(prepared.encoding.size() <= 512, std::string(dataset_info(dataset).name) + " " +
                                                    std::to_string(prepared.encoding.size()));
      longest[dataset] = std::max(longest[dataset], prepared.encoding.size());
      ++encodings;
    }
  }
  c.note(std::to_string(encodings) + " encodings; max GAD " + std::to_string(longest[Dataset::kGAD]) +
         ", ChemProt " + std::to_string(longest[Dataset::kChemProt]) + ", DDI " +
         std::to_string(longest[Dataset::kDDI]) + ", QA " +
         std::to_string(std::max(longest[Dataset::kPubMedQA], longest[Dataset::kBioASQ])));
}

}  // namespace

int main() {
  int failures = 0;
  failures += run(1, "BLURB score reproduction", 1.0, blurb_columns);
  failures += run(2, "BERT fragmentation", 1.0, fragmentation);
  failures += run(3, "tokenizer compatibility", 60.0, tokenizer_golden);
  failures += run(4, "vocab training oracle", 30.0, oracle_equivalence);
  failures += run(5, "in-domain vocabulary direction", 300.0, in_domain_vocab);
  failures += run(6, "masking statistics", 60.0, masking_statistics);
  failures += run(7, "masking schedule", 1.0, masking_schedule);
  failures += run(8, "tagging properties", 60.0, tagging_suite);
  failures += run(9, "metrics oracles", 1.0, metrics_suite);
  failures += run(10, "ChemProt negative expansion", 10.0, negative_expansion);
  failures += run(11, "truncation contract", 60.0, truncation_contract);
  std::printf("%d of 11 criteria failed\n", failures);
  return failures;
}
