#include "cli.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "blurbkit/analysis.hpp"
#include "blurbkit/corpus.hpp"
#include "blurbkit/datasets.hpp"
#include "blurbkit/error.hpp"
#include "blurbkit/io.hpp"
#include "blurbkit/metrics.hpp"
#include "blurbkit/parallel.hpp"
#include "blurbkit/pretrain.hpp"
#include "blurbkit/rng.hpp"
#include "blurbkit/tagging.hpp"
#include "blurbkit/taskprep.hpp"
#include "blurbkit/tokenizer.hpp"
#include "blurbkit/vocab.hpp"

namespace blurbkit::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

// ---- Shared plumbing -------------------------------------------------------

// Destination for a command's main result: an atomically written file, or
// `fallback` when no path was given.
class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) {
    if (!path.empty()) writer_ = std::make_unique<io::AtomicWriter>(path);
    stream_ = writer_ ? &writer_->stream() : &fallback;
  }
  std::ostream& stream() { return *stream_; }
  void commit() {
    if (writer_) writer_->commit();
  }

 private:
  std::unique_ptr<io::AtomicWriter> writer_;
  std::ostream* stream_;
};

// Resolved flags plus toolkit version, written next to the output.
void write_echo(const std::string& output, const std::string& command, ordered_json config) {
  if (output.empty()) return;
  ordered_json echo;
  echo["command"] = command;
  echo["version"] = BLURBKIT_VERSION;
  echo["config"] = std::move(config);
  io::write_file_atomic(output + ".config.json", echo.dump(2) + "\n");
}

std::size_t default_workers() { return 1; }

void check_workers(std::size_t workers) {
  if (workers == 0) throw ConfigError("--workers must be at least 1");
}

std::vector<json> read_jsonl(const std::string& path) {
  std::vector<json> out;
  io::for_each_line(path, [&](std::string_view line, std::size_t lineno) {
    if (line.find_first_not_of(" \t") == std::string_view::npos) return;
    try {
      out.push_back(json::parse(line));
    } catch (const json::exception& e) {
      throw FormatError(path + ":" + std::to_string(lineno) + ": " + e.what());
    }
  });
  return out;
}

std::vector<std::string> read_terms(const std::string& path) {
  if (path.empty()) return probe_terms();
  std::vector<std::string> terms;
  io::for_each_line(path, [&](std::string_view line, std::size_t) {
    const auto b = line.find_first_not_of(" \t");
    if (b == std::string_view::npos || line[b] == '#') return;
    const auto e = line.find_last_not_of(" \t");
    terms.emplace_back(line.substr(b, e - b + 1));
  });
  return terms;
}

Tokenizer make_tokenizer(const std::string& vocab_path, const std::string& casing,
                         std::size_t max_len) {
  const Casing c = parse_casing(casing);
  auto vocab = std::make_shared<const Vocabulary>(load_vocab(vocab_path, c));
  TokenizerConfig config;
  config.casing = c;
  config.max_seq_len = max_len;
  return Tokenizer(std::move(vocab), config);
}

// Maps `n` independent items to output strings on up to `workers` threads;
// the result order is the input order regardless of worker count.
template <typename Fn>
std::vector<std::string> map_ordered(std::size_t n, std::size_t workers, Fn&& fn) {
  std::vector<std::string> out(n);
  run_sharded(n, workers * 4, workers, [&](std::size_t, std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) out[i] = fn(i);
  });
  return out;
}

std::string where(const std::string& path, std::size_t record) {
  return path + ": record " + std::to_string(record + 1);
}

// ---- train-vocab -----------------------------------------------------------

struct TrainVocabArgs {
  std::string corpus;
  std::size_t size = 0;
  std::string scorer = "frequency";
  std::string casing = "uncased";
  std::size_t min_words = 0;
  std::int64_t min_pair_frequency = 2;
  std::string prefix = "##";
  std::string output;
  std::string merges;
  std::string word_counts;
  std::size_t workers = default_workers();
};

void add_train_vocab(CLI::App& app, TrainVocabArgs& a) {
  auto* sub = app.add_subcommand("train-vocab", "Train a subword vocabulary on a corpus");
  sub->add_option("--corpus", a.corpus, "One document per line, optional id<TAB> prefix")->required();
  sub->add_option("--size", a.size, "Target vocabulary size including specials")->required();
  sub->add_option("--scorer", a.scorer, "frequency (BPE) or unigram_likelihood (WordPiece)");
  sub->add_option("--casing", a.casing, "uncased or cased");
  sub->add_option("--min-words", a.min_words, "Skip documents with fewer words");
  sub->add_option("--min-pair-frequency", a.min_pair_frequency, "Pairs rarer than this never merge");
  sub->add_option("--prefix", a.prefix, "Continuation prefix");
  sub->add_option("--output", a.output, "vocab.txt to write")->required();
  sub->add_option("--merges", a.merges, "Merge history to write (default <output>.merges)");
  sub->add_option("--word-counts", a.word_counts, "Also write the word frequency table");
  sub->add_option("--workers", a.workers, "Worker threads; does not change outputs");
}

int train_vocab_cmd(const TrainVocabArgs& a, std::ostream& out) {
  check_workers(a.workers);
  VocabTrainConfig config;
  config.target_size = a.size;
  config.min_pair_frequency = a.min_pair_frequency;
  config.scorer = parse_scorer(a.scorer);
  config.casing = parse_casing(a.casing);
  config.continuation_prefix = a.prefix;
  config.workers = a.workers;
  if (a.size == 0) throw ConfigError("--size must be positive");

  CorpusOptions corpus_options;
  corpus_options.min_words = a.min_words;
  corpus_options.workers = a.workers;
  CorpusStats stats;
  const auto documents = load_corpus(a.corpus, corpus_options, &stats);
  const auto table = build_word_frequencies(documents, config.casing, a.workers);
  const auto result = train_vocab(table, config);

  const std::string merges_path = a.merges.empty() ? a.output + ".merges" : a.merges;
  save_vocab(result.vocab, a.output);
  save_merges(result.merges, merges_path);
  if (!a.word_counts.empty()) {
    io::AtomicWriter writer(a.word_counts);
    table.write(writer.stream());
    writer.commit();
  }
  write_echo(a.output, "train-vocab",
             {{"corpus", a.corpus},
              {"size", a.size},
              {"scorer", to_string(config.scorer)},
              {"casing", to_string(config.casing)},
              {"min_words", a.min_words},
              {"min_pair_frequency", a.min_pair_frequency},
              {"prefix", a.prefix},
              {"output", a.output},
              {"merges", merges_path},
              {"word_counts", a.word_counts},
              {"workers", a.workers}});

  ordered_json summary;
  summary["records"] = stats.records;
  summary["accepted"] = stats.accepted;
  summary["skipped_short"] = stats.skipped_short;
  summary["malformed"] = stats.malformed;
  summary["distinct_words"] = table.size();
  summary["total_words"] = table.total();
  summary["alphabet"] = result.alphabet_size;
  summary["merges"] = result.merges.size();
  summary["size"] = result.vocab.size();
  summary["stop"] = result.stop == StopReason::kTargetReached ? "target_reached" : "no_eligible_pair";
  out << summary.dump() << "\n";
  return kExitOk;
}

// ---- tokenize --------------------------------------------------------------

struct TokenizeArgs {
  std::string vocab;
  std::string casing = "uncased";
  std::string input;
  std::string text;
  std::string output;
  std::size_t max_len = 512;
  std::size_t workers = default_workers();
};

void add_tokenize(CLI::App& app, TokenizeArgs& a) {
  auto* sub = app.add_subcommand("tokenize", "Encode JSONL {id,text} or {id,a,b} records");
  sub->add_option("--vocab", a.vocab, "vocab.txt")->required();
  sub->add_option("--casing", a.casing, "uncased or cased");
  auto* in = sub->add_option("--input", a.input, "JSONL input");
  auto* text = sub->add_option("--text", a.text, "Encode a single text instead");
  in->excludes(text);
  sub->add_option("--output", a.output, "JSONL output (default stdout)");
  sub->add_option("--max-len", a.max_len, "Maximum pieces including specials");
  sub->add_option("--workers", a.workers, "Worker threads; does not change outputs");
}

ordered_json encoding_json(const std::string& id, const Encoding& enc) {
  ordered_json j;
  j["id"] = id;
  j["pieces"] = enc.pieces;
  j["ids"] = enc.ids;
  std::vector<int> segments(enc.segment_ids.begin(), enc.segment_ids.end());
  j["segments"] = segments;
  j["word_index"] = enc.word_index;
  return j;
}

std::string json_id(const json& j, std::size_t ordinal) {
  if (!j.contains("id")) return std::to_string(ordinal);
  return j["id"].is_string() ? j["id"].get<std::string>() : j["id"].dump();
}

Encoding encode_record(const Tokenizer& tok, const json& j, std::size_t max_len) {
  if (j.contains("a") || j.contains("b")) {
    return tok.encode_pair(j.at("a").get<std::string>(), j.at("b").get<std::string>(), max_len);
  }
  return tok.encode(j.at("text").get<std::string>(), max_len);
}

int tokenize_cmd(const TokenizeArgs& a, std::ostream& out) {
  check_workers(a.workers);
  if (a.input.empty() && a.text.empty()) throw ConfigError("one of --input or --text is required");
  const Tokenizer tok = make_tokenizer(a.vocab, a.casing, a.max_len);
  std::vector<json> records;
  if (a.input.empty()) {
    records.push_back({{"id", "0"}, {"text", a.text}});
  } else {
    records = read_jsonl(a.input);
  }
  const auto lines = map_ordered(records.size(), a.workers, [&](std::size_t i) {
    try {
      return encoding_json(json_id(records[i], i), encode_record(tok, records[i], a.max_len)).dump();
    } catch (const json::exception& e) {
      throw FormatError(where(a.input, i) + ": " + e.what());
    }
  });
  Sink sink(a.output, out);
  for (const auto& line : lines) sink.stream() << line << "\n";
  sink.commit();
  write_echo(a.output, "tokenize",
             {{"vocab", a.vocab},
              {"casing", a.casing},
              {"input", a.input},
              {"text", a.text},
              {"output", a.output},
              {"max_len", a.max_len},
              {"workers", a.workers}});
  return kExitOk;
}

// ---- mask ------------------------------------------------------------------

struct MaskArgs {
  std::string vocab;
  std::string casing = "uncased";
  std::string input;
  std::string output;
  std::optional<std::uint64_t> seed;
  double rate = 0.15;
  std::optional<double> progress;
  bool wwm = false;
  bool binary = false;
  std::size_t max_len = 512;
  std::size_t workers = default_workers();
};

void add_mask(CLI::App& app, MaskArgs& a) {
  auto* sub = app.add_subcommand(
      "mask", "Build masked-LM examples from JSONL text, pairs, or pre-tokenized ids");
  sub->add_option("--vocab", a.vocab, "vocab.txt")->required();
  sub->add_option("--casing", a.casing, "uncased or cased");
  sub->add_option("--input", a.input,
                  "JSONL: {text} | {a,b[,is_next]} | {ids,word_index[,segments][,is_next]}")
      ->required();
  sub->add_option("--output", a.output, "Output file")->required();
  sub->add_option("--seed", a.seed, "Random seed (record i uses derive_seed(seed, i))")->required();
  auto* rate = sub->add_option("--rate", a.rate, "Masking rate");
  auto* progress = sub->add_option("--progress", a.progress,
                                   "Training progress in [0,1]; rate from the stepwise schedule");
  rate->excludes(progress);
  sub->add_flag("--wwm", a.wwm, "Whole-word masking");
  sub->add_flag("--binary", a.binary, "Length-prefixed binary records instead of JSONL");
  sub->add_option("--max-len", a.max_len, "Maximum pieces including specials");
  sub->add_option("--workers", a.workers, "Worker threads; does not change outputs");
}

Encoding pretokenized(const json& j, const Vocabulary& vocab) {
  Encoding enc;
  enc.ids = j.at("ids").get<std::vector<TokenId>>();
  enc.word_index = j.at("word_index").get<std::vector<std::int32_t>>();
  if (enc.word_index.size() != enc.ids.size()) {
    throw DataError("ids and word_index lengths differ (" + std::to_string(enc.ids.size()) +
                    " vs " + std::to_string(enc.word_index.size()) + ")");
  }
  if (j.contains("segments")) {
    for (int s : j.at("segments").get<std::vector<int>>()) enc.segment_ids.push_back(static_cast<std::uint8_t>(s));
    if (enc.segment_ids.size() != enc.ids.size()) throw DataError("segments length differs from ids");
  } else {
    enc.segment_ids.assign(enc.ids.size(), 0);
  }
  for (TokenId id : enc.ids) enc.pieces.push_back(vocab.token(id));
  enc.offsets.assign(enc.ids.size(), Offset{});
  return enc;
}

int mask_cmd(const MaskArgs& a) {
  check_workers(a.workers);
  const double rate = a.progress ? masking_rate(*a.progress) : a.rate;
  if (!(rate >= 0.0 && rate <= 1.0)) throw ConfigError("--rate must be in [0, 1]");
  const Tokenizer tok = make_tokenizer(a.vocab, a.casing, a.max_len);
  const auto records = read_jsonl(a.input);
  const auto chunks = map_ordered(records.size(), a.workers, [&](std::size_t i) {
    const json& j = records[i];
    try {
      const Encoding enc = j.contains("ids") ? pretokenized(j, tok.vocab())
                                             : encode_record(tok, j, a.max_len);
      std::optional<bool> is_next;
      if (j.contains("is_next")) is_next = j.at("is_next").get<bool>();
      const auto example = make_mlm_example(enc, rate, a.wwm, derive_seed(*a.seed, i), tok.vocab(), is_next);
      if (!a.binary) return to_jsonl(example) + "\n";
      std::ostringstream bytes;
      write_binary(bytes, example);
      return bytes.str();
    } catch (const json::exception& e) {
      throw FormatError(where(a.input, i) + ": " + e.what());
    } catch (const DataError& e) {
      throw DataError(where(a.input, i) + ": " + e.what());
    }
  });
  io::AtomicWriter writer(a.output);
  for (const auto& c : chunks) writer.stream() << c;
  writer.commit();
  ordered_json echo{{"vocab", a.vocab},   {"casing", a.casing}, {"input", a.input},
                    {"output", a.output}, {"seed", *a.seed},    {"rate", rate}};
  echo["progress"] = a.progress ? json(*a.progress) : json(nullptr);
  echo["wwm"] = a.wwm;
  echo["binary"] = a.binary;
  echo["max_len"] = a.max_len;
  echo["workers"] = a.workers;
  write_echo(a.output, "mask", echo);
  return kExitOk;
}

// ---- nsp -------------------------------------------------------------------

struct NspArgs {
  std::string corpus;
  std::string output;
  std::optional<std::uint64_t> seed;
  double next_probability = 0.5;
  std::size_t min_words = 0;
  std::size_t workers = default_workers();
};

void add_nsp(CLI::App& app, NspArgs& a) {
  auto* sub = app.add_subcommand("nsp", "Build next-sentence-prediction pairs from a corpus");
  sub->add_option("--corpus", a.corpus, "One document per line, optional id<TAB> prefix")->required();
  sub->add_option("--output", a.output, "JSONL {id,a,b,is_next}")->required();
  sub->add_option("--seed", a.seed, "Random seed")->required();
  sub->add_option("--next-probability", a.next_probability,
                  "Probability of keeping the true next sentence (1 = true pairs only)");
  sub->add_option("--min-words", a.min_words, "Skip documents with fewer words");
  sub->add_option("--workers", a.workers, "Worker threads for corpus loading");
}

int nsp_cmd(const NspArgs& a) {
  check_workers(a.workers);
  CorpusOptions options;
  options.min_words = a.min_words;
  options.workers = a.workers;
  const auto documents = load_corpus(a.corpus, options);
  NspOptions nsp;
  nsp.next_probability = a.next_probability;
  const auto pairs = build_nsp_pairs(documents, *a.seed, nsp);
  io::AtomicWriter writer(a.output);
  for (const auto& p : pairs) {
    const auto& doc = documents[p.first.document];
    ordered_json j;
    j["id"] = doc.id + "." + std::to_string(p.first.sentence);
    j["a"] = doc.sentences[p.first.sentence].text;
    j["b"] = documents[p.second.document].sentences[p.second.sentence].text;
    j["is_next"] = p.is_next;
    writer.stream() << j.dump() << "\n";
  }
  writer.commit();
  write_echo(a.output, "nsp",
             {{"corpus", a.corpus},
              {"output", a.output},
              {"seed", *a.seed},
              {"next_probability", a.next_probability},
              {"min_words", a.min_words},
              {"workers", a.workers}});
  return kExitOk;
}

// ---- prep ------------------------------------------------------------------

struct PrepArgs {
  std::string dataset;
  std::string input;
  std::string output;
  std::string vocab;
  std::string casing = "uncased";
  std::string scheme = "bio";
  bool swapped_letters = false;
  std::string relation_mode = "dummify";
  std::size_t default_max_len = 512;
  std::size_t workers = default_workers();
};

void add_prep(CLI::App& app, PrepArgs& a) {
  auto* sub = app.add_subcommand("prep", "Prepare BLURB task records as model inputs");
  sub->add_option("--dataset", a.dataset, "BLURB dataset name (e.g. BC5-chem, ChemProt, GAD)")->required();
  sub->add_option("--input", a.input, "CoNLL TSV (NER/PICO) or task JSONL")->required();
  sub->add_option("--output", a.output, "JSONL output (default stdout)");
  sub->add_option("--vocab", a.vocab, "vocab.txt")->required();
  sub->add_option("--casing", a.casing, "uncased or cased");
  sub->add_option("--scheme", a.scheme, "NER output tagging scheme: bio, bioul or io");
  sub->add_flag("--swapped-bioul-letters", a.swapped_letters,
                "Swap L and U in BIOUL tags (L = unit, U = last)");
  sub->add_option("--relation-mode", a.relation_mode, "dummify, markers or original");
  sub->add_option("--default-max-len", a.default_max_len,
                  "Max pieces for datasets without a fixed length");
  sub->add_option("--workers", a.workers, "Worker threads; does not change outputs");
}

int prep_cmd(const PrepArgs& a, std::ostream& out) {
  check_workers(a.workers);
  const Dataset dataset = parse_dataset(a.dataset);
  const auto& info = dataset_info(dataset);
  PrepConfig config;
  config.scheme = parse_scheme(a.scheme);
  config.tag_options.swapped_bioul_letters = a.swapped_letters;
  config.relation_mode = parse_relation_mode(a.relation_mode);
  config.default_max_len = a.default_max_len;
  const auto records = read_task_records(info.task, a.input);
  Tokenizer tok = make_tokenizer(a.vocab, a.casing, std::max<std::size_t>(a.default_max_len, 512));

  std::vector<std::string> reserved;
  if (info.task == TaskType::kNer) {
    // One label inventory for the whole file so ids are comparable across records.
    std::set<std::string> types;
    for (const auto& r : records) {
      const auto& s = std::get<TaggedSentence>(r);
      for (const auto& span : tags_to_spans(TagSequence{infer_scheme(s.tags), s.tags},
                                            RepairMode::kConll, config.tag_options)) {
        types.insert(span.type);
      }
    }
    config.tag_labels = tag_set(config.scheme, {types.begin(), types.end()});
  } else if (info.task == TaskType::kRelation && config.relation_mode != RelationMode::kOriginal) {
    std::set<std::string> types;
    for (const auto& r : records) {
      const auto& rel = std::get<RelationInstance>(r);
      types.insert(rel.e1.type);
      types.insert(rel.e2.type);
    }
    const std::vector<std::string> type_list(types.begin(), types.end());
    reserved = reserved_tokens(config.relation_mode, type_list);
    tok = with_reserved_tokens(tok, reserved);
  }

  const auto lines = map_ordered(records.size(), a.workers, [&](std::size_t i) {
    try {
      return to_json(prepare_task_encoding(dataset, records[i], tok, config)).dump();
    } catch (const DataError& e) {
      throw DataError(where(a.input, i) + ": " + e.what());
    }
  });
  Sink sink(a.output, out);
  for (const auto& line : lines) sink.stream() << line << "\n";
  sink.commit();
  ordered_json echo{{"dataset", info.name},
                    {"task", to_string(info.task)},
                    {"input", a.input},
                    {"output", a.output},
                    {"vocab", a.vocab},
                    {"casing", a.casing},
                    {"scheme", to_string(config.scheme)},
                    {"swapped_bioul_letters", a.swapped_letters},
                    {"relation_mode", to_string(config.relation_mode)},
                    {"max_len", task_max_length(dataset, a.default_max_len)},
                    {"workers", a.workers}};
  echo["tag_labels"] = config.tag_labels;
  echo["reserved_tokens"] = reserved;
  write_echo(a.output, "prep", echo);
  return kExitOk;
}

// ---- score -----------------------------------------------------------------

struct ScoreBlurbArgs {
  std::string scores;
  std::string output;
  bool json = false;
};

struct ScoreDatasetArgs {
  std::string dataset;
  std::string gold;
  std::string pred;
  std::string output;
  std::string scheme;
  std::optional<std::string> negative_label;
  bool no_negative = false;
  std::optional<std::string> positive_label;
};

struct ScoreMeanArgs {
  std::vector<double> values;
};

struct ScoreArgs {
  ScoreBlurbArgs blurb;
  ScoreDatasetArgs dataset;
  ScoreMeanArgs mean;
};

void add_score(CLI::App& app, ScoreArgs& a) {
  auto* sub = app.add_subcommand("score", "Evaluate predictions and aggregate BLURB scores");
  sub->require_subcommand(1);
  auto* blurb = sub->add_subcommand("blurb", "BLURB score from 13 per-dataset scores");
  blurb->add_option("--scores", a.blurb.scores,
                    "JSON object {dataset: percent} or array of metric reports")
      ->required();
  blurb->add_option("--output", a.blurb.output, "Write the full JSON report here");
  blurb->add_flag("--json", a.blurb.json, "Print the full JSON report instead of the score");

  auto* ds = sub->add_subcommand("dataset", "Score one dataset's predictions");
  ds->add_option("--dataset", a.dataset.dataset, "BLURB dataset name")->required();
  ds->add_option("--gold", a.dataset.gold, "Gold file in the prep input format")->required();
  ds->add_option("--pred", a.dataset.pred,
                 "JSONL {id,pred} (any task) or CoNLL TSV aligned with gold (NER/PICO)")
      ->required();
  ds->add_option("--output", a.dataset.output, "Write the report here (default stdout)");
  ds->add_option("--scheme", a.dataset.scheme, "Tag scheme for decoding (default: inferred)");
  auto* neg = ds->add_option("--negative-label", a.dataset.negative_label,
                             "Class excluded from micro F1 (ChemProt/DDI default: false)");
  auto* none = ds->add_flag("--no-negative", a.dataset.no_negative, "Pool over every class");
  auto* pos = ds->add_option("--positive-label", a.dataset.positive_label,
                             "Binary tasks: F1 of this class only");
  neg->excludes(none);
  pos->excludes(neg);
  pos->excludes(none);

  auto* mean = sub->add_subcommand("mean", "Arithmetic mean of repeated-run scores");
  mean->add_option("values", a.mean.values, "Scores")->required();
}

std::map<std::string, double> read_blurb_scores(const std::string& path) {
  json j;
  try {
    j = json::parse(io::read_file(path));
  } catch (const json::exception& e) {
    throw FormatError(path + ": " + e.what());
  }
  std::map<std::string, double> scores;
  const auto put = [&](const std::string& name, double v) {
    if (!scores.emplace(name, v).second) throw DataError(path + ": '" + name + "' given twice");
  };
  try {
    if (j.is_object()) {
      for (const auto& [name, v] : j.items()) put(name, v.get<double>());
    } else if (j.is_array()) {
      // Metric reports carry fractions; BLURB aggregates percentages.
      for (const auto& r : j) put(r.at("dataset").get<std::string>(), 100.0 * r.at("value").get<double>());
    } else {
      throw FormatError(path + ": expected an object or an array");
    }
  } catch (const json::exception& e) {
    throw FormatError(path + ": " + e.what());
  }
  return scores;
}

int score_blurb_cmd(const ScoreBlurbArgs& a, std::ostream& out) {
  const auto result = blurb_score(read_blurb_scores(a.scores));
  const auto report = result.to_json();
  if (!a.output.empty()) io::write_file_atomic(a.output, report.dump(2) + "\n");
  if (a.json) {
    out << report.dump(2) << "\n";
  } else {
    out << format_score(result.score) << "\n";
  }
  return kExitOk;
}

std::string record_id(const TaskRecord& r) {
  return std::visit([](const auto& x) { return x.id; }, r);
}

class Predictions {
 public:
  Predictions(const std::string& path, TaskType task, std::size_t gold_count) : path_(path) {
    const auto ext = fs::path(path).extension().string();
    if ((task == TaskType::kNer || task == TaskType::kPico) && ext != ".jsonl" && ext != ".json") {
      for (auto& s : read_conll(path)) ordered_.push_back(json(s.tags));
      if (ordered_.size() != gold_count) {
        throw DataError(path + ": " + std::to_string(ordered_.size()) + " predicted sentences but " +
                        std::to_string(gold_count) + " gold");
      }
      return;
    }
    std::size_t i = 0;
    for (auto& j : read_jsonl(path)) {
      if (!j.contains("pred")) throw FormatError(where(path, i) + ": missing \"pred\"");
      const std::string id = json_id(j, i);
      if (!by_id_.emplace(id, j.at("pred")).second) {
        throw DataError(path + ": duplicate prediction for id '" + id + "'");
      }
      ++i;
    }
  }

  const json& get(std::size_t ordinal, const std::string& id) const {
    if (!ordered_.empty()) return ordered_[ordinal];
    const auto it = by_id_.find(id);
    if (it == by_id_.end()) throw DataError(path_ + ": no prediction for id '" + id + "'");
    return it->second;
  }

 private:
  std::string path_;
  std::vector<json> ordered_;
  std::map<std::string, json> by_id_;
};

MetricReport score_dataset(const ScoreDatasetArgs& a) {
  const Dataset dataset = parse_dataset(a.dataset);
  const auto& info = dataset_info(dataset);
  const auto gold = read_task_records(info.task, a.gold);
  const Predictions pred(a.pred, info.task, gold.size());
  std::optional<TagScheme> scheme;
  if (!a.scheme.empty()) scheme = parse_scheme(a.scheme);

  const auto tags_of = [&](std::size_t i, const std::string& id, std::size_t n) {
    auto tags = pred.get(i, id).get<std::vector<std::string>>();
    if (tags.size() != n) {
      throw DataError(a.pred + ": '" + id + "' has " + std::to_string(tags.size()) +
                      " predicted tags for " + std::to_string(n) + " words");
    }
    return tags;
  };

  MetricReport report;
  try {
    switch (info.task) {
      case TaskType::kNer: {
        std::vector<std::vector<EntitySpan>> g, p;
        for (std::size_t i = 0; i < gold.size(); ++i) {
          const auto& s = std::get<TaggedSentence>(gold[i]);
          const auto tags = tags_of(i, s.id, s.words.size());
          g.push_back(tags_to_spans(TagSequence{scheme.value_or(infer_scheme(s.tags)), s.tags},
                                    RepairMode::kConll));
          p.push_back(tags_to_spans(TagSequence{scheme.value_or(infer_scheme(tags)), tags},
                                    RepairMode::kConll));
        }
        report = entity_f1(g, p);
        break;
      }
      case TaskType::kPico: {
        std::vector<PicoLabels> g, p;
        for (std::size_t i = 0; i < gold.size(); ++i) {
          const auto& s = std::get<PicoSentence>(gold[i]);
          g.push_back(s.labels);
          p.push_back(to_pico(TaggedSentence{s.id, s.words, tags_of(i, s.id, s.words.size())}).labels);
        }
        report = word_macro_f1_pico(g, p);
        break;
      }
      case TaskType::kRelation:
      case TaskType::kQa: {
        std::vector<std::string> g, p;
        for (std::size_t i = 0; i < gold.size(); ++i) {
          const std::string id = record_id(gold[i]);
          g.push_back(info.task == TaskType::kQa ? std::get<QaRecord>(gold[i]).label
                                                 : std::get<RelationInstance>(gold[i]).label);
          p.push_back(pred.get(i, id).get<std::string>());
        }
        if (info.task == TaskType::kQa) {
          report = accuracy(g, p);
          break;
        }
        std::optional<std::string> negative = a.negative_label;
        if (!negative && !a.no_negative &&
            (dataset == Dataset::kChemProt || dataset == Dataset::kDDI)) {
          negative = "false";
        }
        if (a.positive_label) {
          // Every other class becomes the excluded one.
          negative = std::string("\x1f") + "other";
          for (auto* v : {&g, &p}) {
            for (auto& label : *v) {
              if (label != *a.positive_label) label = *negative;
            }
          }
        }
        report = negative ? micro_f1(g, p, *negative) : micro_f1(g, p);
        if (negative && !a.positive_label) report.support["negative_label_excluded"] = 1.0;
        break;
      }
      case TaskType::kSimilarity: {
        std::vector<double> g, p;
        for (std::size_t i = 0; i < gold.size(); ++i) {
          const auto& r = std::get<SimilarityRecord>(gold[i]);
          g.push_back(r.score);
          p.push_back(pred.get(i, r.id).get<double>());
        }
        report = pearson(g, p);
        break;
      }
      case TaskType::kClassification: {
        std::vector<std::vector<bool>> g, p;
        for (std::size_t i = 0; i < gold.size(); ++i) {
          const auto& r = std::get<ClassificationRecord>(gold[i]);
          g.push_back(r.labels);
          std::vector<bool> labels;
          for (const auto& b : pred.get(i, r.id)) {
            labels.push_back(b.is_boolean() ? b.get<bool>() : b.get<int>() != 0);
          }
          p.push_back(std::move(labels));
        }
        report = micro_f1_multilabel(g, p);
        break;
      }
    }
  } catch (const json::exception& e) {
    throw FormatError(a.pred + ": " + e.what());
  }
  report.dataset = info.name;
  return report;
}

int score_dataset_cmd(const ScoreDatasetArgs& a, std::ostream& out) {
  const auto report = score_dataset(a);
  Sink sink(a.output, out);
  sink.stream() << report.to_json().dump(2) << "\n";
  sink.commit();
  return kExitOk;
}

int score_mean_cmd(const ScoreMeanArgs& a, std::ostream& out) {
  CompensatedSum sum;
  for (double v : a.values) sum.add(v);
  const double mean = sum.value() / static_cast<double>(a.values.size());
  out << ordered_json{{"n", a.values.size()}, {"mean", mean}}.dump() << "\n";
  return kExitOk;
}

// ---- analyze / compare-vocabs ----------------------------------------------

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + "\"";
}

std::string fragmentation_csv(const FragmentationReport& r) {
  std::string out = "term,normalized,piece_count,in_vocab_whole,pieces\n";
  for (const auto& t : r.terms) {
    std::string pieces;
    for (const auto& p : t.pieces) pieces += (pieces.empty() ? "" : " ") + p;
    out += csv_field(t.term) + "," + csv_field(t.normalized) + "," +
           std::to_string(t.pieces.size()) + "," + (t.whole ? "true" : "false") + "," +
           csv_field(pieces) + "\n";
  }
  return out;
}

std::vector<std::string> corpus_texts(const std::string& path) {
  std::vector<std::string> texts;
  if (path.empty()) return texts;
  for (auto& d : load_corpus(path, 0)) texts.push_back(std::move(d.text));
  return texts;
}

struct AnalyzeArgs {
  std::string vocab;
  std::string casing = "uncased";
  std::string terms;
  std::string corpus;
  std::string records;
  std::string dataset;
  std::string relation_mode = "dummify";
  std::string format = "json";
  std::string output;
};

void add_analyze(CLI::App& app, AnalyzeArgs& a) {
  auto* sub = app.add_subcommand("analyze", "Term fragmentation and encoded length under a vocabulary");
  sub->add_option("--vocab", a.vocab, "vocab.txt")->required();
  sub->add_option("--casing", a.casing, "uncased or cased");
  sub->add_option("--terms", a.terms, "One term per line (default: built-in biomedical probe terms)");
  auto* corpus = sub->add_option("--corpus", a.corpus, "Corpus for mean pieces per document");
  auto* records = sub->add_option("--records", a.records, "Task records for mean pieces per record");
  corpus->excludes(records);
  sub->add_option("--dataset", a.dataset, "Dataset of --records");
  sub->add_option("--relation-mode", a.relation_mode, "Relation input transformation for --records");
  sub->add_option("--format", a.format, "json, text or csv")
      ->check(CLI::IsMember({"json", "text", "csv"}));
  sub->add_option("--output", a.output, "Output file (default stdout)");
}

int analyze_cmd(const AnalyzeArgs& a, std::ostream& out) {
  const Tokenizer tok = make_tokenizer(a.vocab, a.casing, 512);
  const auto frag = fragmentation_report(tok, read_terms(a.terms));
  std::optional<LengthReport> length;
  if (!a.corpus.empty()) {
    length = avg_length(tok, corpus_texts(a.corpus));
    length->corpus_id = a.corpus;
  } else if (!a.records.empty()) {
    if (a.dataset.empty()) throw ConfigError("--records needs --dataset");
    const auto& info = dataset_info(parse_dataset(a.dataset));
    length = avg_length(tok, read_task_records(info.task, a.records),
                        parse_relation_mode(a.relation_mode));
    length->corpus_id = a.records;
  }
  if (length) length->vocab_id = a.vocab;

  Sink sink(a.output, out);
  auto& s = sink.stream();
  if (a.format == "csv") {
    s << fragmentation_csv(frag);
  } else if (a.format == "text") {
    s << frag.to_text();
    if (length) {
      char buf[128];
      std::snprintf(buf, sizeof buf, "mean pieces per record %.3f over %zu records (%zu empty)\n",
                    length->mean, length->records, length->empty_records);
      s << buf;
    }
  } else {
    ordered_json j;
    j["vocab"] = a.vocab;
    j["fragmentation"] = frag.to_json();
    if (length) j["length"] = length->to_json();
    s << j.dump(2) << "\n";
  }
  sink.commit();
  write_echo(a.output, "analyze",
             {{"vocab", a.vocab},
              {"casing", a.casing},
              {"terms", a.terms},
              {"corpus", a.corpus},
              {"records", a.records},
              {"dataset", a.dataset},
              {"relation_mode", a.relation_mode},
              {"format", a.format}});
  return kExitOk;
}

struct CompareArgs {
  std::string vocab_a;
  std::string vocab_b;
  std::string name_a;
  std::string name_b;
  std::string casing_a = "uncased";
  std::string casing_b = "uncased";
  std::string terms;
  std::string corpus;
  std::string format = "json";
  std::string output;
};

void add_compare(CLI::App& app, CompareArgs& a) {
  auto* sub = app.add_subcommand("compare-vocabs", "Side-by-side fragmentation and length report");
  sub->add_option("--vocab-a", a.vocab_a, "First vocab.txt")->required();
  sub->add_option("--vocab-b", a.vocab_b, "Second vocab.txt")->required();
  sub->add_option("--name-a", a.name_a, "Label of the first vocabulary (default: file stem)");
  sub->add_option("--name-b", a.name_b, "Label of the second vocabulary (default: file stem)");
  sub->add_option("--casing-a", a.casing_a, "uncased or cased");
  sub->add_option("--casing-b", a.casing_b, "uncased or cased");
  sub->add_option("--terms", a.terms, "One term per line (default: built-in biomedical probe terms)");
  sub->add_option("--corpus", a.corpus, "Corpus for mean pieces per document");
  sub->add_option("--format", a.format, "json or text")->check(CLI::IsMember({"json", "text"}));
  sub->add_option("--output", a.output, "Output file (default stdout)");
}

int compare_cmd(const CompareArgs& a, std::ostream& out) {
  const Tokenizer ta = make_tokenizer(a.vocab_a, a.casing_a, 512);
  const Tokenizer tb = make_tokenizer(a.vocab_b, a.casing_b, 512);
  const std::string name_a = a.name_a.empty() ? fs::path(a.vocab_a).stem().string() : a.name_a;
  const std::string name_b = a.name_b.empty() ? fs::path(a.vocab_b).stem().string() : a.name_b;
  const auto texts = corpus_texts(a.corpus);
  auto cmp = compare_vocabs(ta, tb, read_terms(a.terms), texts, name_a, name_b);
  cmp.length_a.corpus_id = cmp.length_b.corpus_id = a.corpus;
  cmp.length_a.vocab_id = a.vocab_a;
  cmp.length_b.vocab_id = a.vocab_b;
  Sink sink(a.output, out);
  sink.stream() << (a.format == "text" ? cmp.to_text() : cmp.to_json().dump(2) + "\n");
  sink.commit();
  write_echo(a.output, "compare-vocabs",
             {{"vocab_a", a.vocab_a},
              {"vocab_b", a.vocab_b},
              {"name_a", name_a},
              {"name_b", name_b},
              {"casing_a", a.casing_a},
              {"casing_b", a.casing_b},
              {"terms", a.terms},
              {"corpus", a.corpus},
              {"format", a.format}});
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"BLURB / PubMedBERT data toolkit", "blurbkit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", BLURBKIT_VERSION);
  app.option_defaults()->always_capture_default();

  TrainVocabArgs train;
  TokenizeArgs tokenize;
  MaskArgs mask;
  NspArgs nsp;
  PrepArgs prep;
  ScoreArgs score;
  AnalyzeArgs analyze;
  CompareArgs compare;
  add_train_vocab(app, train);
  add_tokenize(app, tokenize);
  add_mask(app, mask);
  add_nsp(app, nsp);
  add_prep(app, prep);
  add_score(app, score);
  add_analyze(app, analyze);
  add_compare(app, compare);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kExitOk : kExitUsage;
  }

  try {
    const auto* sub = app.get_subcommands().front();
    const std::string name = sub->get_name();
    if (name == "train-vocab") return train_vocab_cmd(train, out);
    if (name == "tokenize") return tokenize_cmd(tokenize, out);
    if (name == "mask") return mask_cmd(mask);
    if (name == "nsp") return nsp_cmd(nsp);
    if (name == "prep") return prep_cmd(prep, out);
    if (name == "analyze") return analyze_cmd(analyze, out);
    if (name == "compare-vocabs") return compare_cmd(compare, out);
    if (name == "score") {
      const std::string what = sub->get_subcommands().front()->get_name();
      if (what == "blurb") return score_blurb_cmd(score.blurb, out);
      if (what == "dataset") return score_dataset_cmd(score.dataset, out);
      return score_mean_cmd(score.mean, out);
    }
    err << "blurbkit: unknown command '" << name << "'\n";
    return kExitUsage;
  } catch (const ConfigError& e) {
    err << "blurbkit: config error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    err << "blurbkit: error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    err << "blurbkit: error: " << e.what() << "\n";
    return kExitData;
  }
}

}  // namespace blurbkit::cli
