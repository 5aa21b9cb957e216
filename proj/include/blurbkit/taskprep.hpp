#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

#include "blurbkit/datasets.hpp"
#include "blurbkit/tagging.hpp"
#include "blurbkit/tokenizer.hpp"

namespace blurbkit {

// ---- Records ---------------------------------------------------------------

// NER sentence from CoNLL TSV: one tag per word.
struct TaggedSentence {
  std::string id;
  std::vector<std::string> words;
  std::vector<std::string> tags;

  bool operator==(const TaggedSentence&) const = default;
};

enum PicoElement : std::size_t { kParticipants = 0, kIntervention = 1, kOutcome = 2 };
inline constexpr std::array<std::string_view, 3> kPicoTags{"I-PAR", "I-INT", "I-OUT"};

// Three parallel binary word-level sequences; a word may be positive in more
// than one element.
struct PicoLabels {
  std::array<std::vector<bool>, 3> elements;

  std::size_t size() const { return elements[0].size(); }
  void validate() const;  // equal lengths
  bool operator==(const PicoLabels&) const = default;
};

struct PicoSentence {
  std::string id;
  std::vector<std::string> words;
  PicoLabels labels;

  bool operator==(const PicoSentence&) const = default;
};

// Relation instance over whitespace words; entity spans are word ordinals.
struct RelationInstance {
  std::string id;
  std::vector<std::string> words;
  EntitySpan e1;
  EntitySpan e2;
  std::string label;

  void validate() const;  // spans in range, distinct, non-overlapping
  bool operator==(const RelationInstance&) const = default;
};

struct SimilarityRecord {
  std::string id;
  std::string a;
  std::string b;
  double score = 0.0;
};

struct QaRecord {
  std::string id;
  std::string question;
  std::string text;
  std::string label;
};

struct ClassificationRecord {
  std::string id;
  std::string text;
  std::vector<bool> labels;
};

using TaskRecord = std::variant<TaggedSentence, PicoSentence, RelationInstance, SimilarityRecord,
                                QaRecord, ClassificationRecord>;

// ---- Relation input transformation -----------------------------------------

enum class RelationMode { kDummify, kMarkers, kOriginal };

std::string_view to_string(RelationMode mode);
RelationMode parse_relation_mode(std::string_view name);

struct TransformedText {
  std::vector<std::string> words;
  // Source word ordinal per output word; -1 for inserted markers/dummies.
  std::vector<std::int32_t> source_word;

  std::string text() const;  // words joined by single spaces
};

// DUMMIFY: each entity's words become one "$TYPE" token. MARKERS: entities
// are wrapped in "<e1> ... </e1>" / "<e2> ... </e2>". ORIGINAL: unchanged.
// Throws DataError on overlapping or out-of-range entities.
TransformedText transform_relation(const RelationInstance& instance, RelationMode mode);

inline constexpr std::array<std::string_view, 4> kMarkerTokens{"<e1>", "</e1>", "<e2>", "</e2>"};
std::string dummy_token(std::string_view entity_type);

// Reserved tokens a mode introduces for the given entity types (raw form).
std::vector<std::string> reserved_tokens(RelationMode mode, std::span<const std::string> types);

// Tokenizer whose vocabulary and protected set include `tokens` (stored in
// normalized form) so they are never split.
Tokenizer with_reserved_tokens(const Tokenizer& tokenizer, std::span<const std::string> tokens);

// ---- ChemProt negative expansion -------------------------------------------

struct Mention {
  std::string id;
  EntitySpan span;
};

struct RelationSentence {
  std::string id;
  std::vector<std::string> words;
  std::vector<Mention> chemicals;
  std::vector<Mention> proteins;
};

enum class SplitMode { kTrain, kDev, kTest };

SplitMode parse_split(std::string_view name);

// Labeled instances reference sentences by id (instance id "<sentence>" or
// "<sentence>.<anything>") and mentions by exact word span. Train/dev:
// every chemical x protein pair of each sentence is emitted once, carrying
// its label when one was given and `negative_label` otherwise. Test: labeled
// instances only (no expansion recipe is assumed). Throws DataError on
// unknown sentences/mentions or duplicate labels.
std::vector<RelationInstance> expand_negatives(std::span<const RelationSentence> sentences,
                                               std::span<const RelationInstance> labeled,
                                               SplitMode split = SplitMode::kTrain,
                                               std::string_view negative_label = "false");

// ---- Model inputs ----------------------------------------------------------

struct PrepConfig {
  TagScheme scheme = TagScheme::kBIO;
  TagOptions tag_options;
  RelationMode relation_mode = RelationMode::kDummify;
  // Tag inventory for NER label ids; empty means derive from the record.
  std::vector<std::string> tag_labels;
  std::size_t default_max_len = 512;
};

struct PreparedRecord {
  std::string id;
  Encoding encoding;
  // Per piece: tag id (NER), P/I/O bitmask (PICO, bit k = element k), or
  // kIgnoreLabel for specials and continuation pieces. Empty for
  // sequence-level tasks.
  std::vector<std::int32_t> piece_labels;
  std::vector<std::string> word_tags;  // NER: tags in the configured scheme
  nlohmann::ordered_json target;       // sequence-level label/score
};

inline constexpr std::int32_t kIgnoreLabelId = -100;

// Applies the task's input transformation and encodes with the dataset's
// max length. Relation records in DUMMIFY/MARKERS mode need a tokenizer from
// with_reserved_tokens() for the reserved tokens to stay whole.
PreparedRecord prepare_task_encoding(Dataset dataset, const TaskRecord& record,
                                     const Tokenizer& tokenizer, const PrepConfig& config);

// First piece of each word carries the word's label; everything else gets
// kIgnoreLabelId.
std::vector<std::int32_t> project_word_labels(const Encoding& encoding,
                                              std::span<const std::int32_t> word_labels);
// Inverse: word labels recovered from first pieces (words truncated away are
// absent from the result).
std::vector<std::int32_t> recover_word_labels(const Encoding& encoding,
                                              std::span<const std::int32_t> piece_labels);

nlohmann::ordered_json to_json(const PreparedRecord& record);

// ---- File formats ----------------------------------------------------------

// word<TAB>tag lines, blank line between sentences; ids are "s<ordinal>".
std::vector<TaggedSentence> read_conll(std::istream& in, std::string_view source = "<stream>");
std::vector<TaggedSentence> read_conll(const std::filesystem::path& path);
void write_conll(std::ostream& out, std::span<const TaggedSentence> sentences);

// PICO TSV: tag column is "O" or '|'-joined subset of I-PAR, I-INT, I-OUT.
PicoSentence to_pico(const TaggedSentence& sentence);
TaggedSentence from_pico(const PicoSentence& sentence);

// JSONL task records by task type; `where` is used in error messages.
TaskRecord parse_task_record(TaskType task, const nlohmann::json& j, std::string_view where = "");
std::vector<TaskRecord> read_task_records(TaskType task, const std::filesystem::path& path);

// Entity spans of every sentence decoded with CoNLL repair.
std::vector<std::vector<EntitySpan>> sentence_spans(std::span<const TaggedSentence> sentences,
                                                    TagScheme scheme,
                                                    const TagOptions& options = {});

}  // namespace blurbkit
