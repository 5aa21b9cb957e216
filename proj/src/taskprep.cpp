#include "blurbkit/taskprep.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <tuple>

#include "blurbkit/error.hpp"
#include "blurbkit/io.hpp"

namespace blurbkit {

using nlohmann::json;
using nlohmann::ordered_json;

void PicoLabels::validate() const {
  for (const auto& e : elements) {
    if (e.size() != elements[0].size()) {
      throw DataError("PICO element sequences differ in length (" +
                      std::to_string(elements[0].size()) + " vs " + std::to_string(e.size()) + ")");
    }
  }
}

namespace {

void check_span(const EntitySpan& s, std::size_t n, std::string_view name) {
  if (s.start > s.end || s.end >= n) {
    throw DataError(std::string(name) + " span (" + std::to_string(s.start) + ", " +
                    std::to_string(s.end) + ") out of range for " + std::to_string(n) + " words");
  }
}

bool overlaps(const EntitySpan& a, const EntitySpan& b) {
  return a.start <= b.end && b.start <= a.end;
}

}  // namespace

void RelationInstance::validate() const {
  check_span(e1, words.size(), "e1");
  check_span(e2, words.size(), "e2");
  if (overlaps(e1, e2)) {
    throw DataError("relation '" + id + "': e1 (" + std::to_string(e1.start) + ", " +
                    std::to_string(e1.end) + ") overlaps e2 (" + std::to_string(e2.start) + ", " +
                    std::to_string(e2.end) + ")");
  }
}

// ---- Relation input transformation -----------------------------------------

std::string_view to_string(RelationMode mode) {
  switch (mode) {
    case RelationMode::kDummify: return "dummify";
    case RelationMode::kMarkers: return "markers";
    case RelationMode::kOriginal: return "original";
  }
  return "?";
}

RelationMode parse_relation_mode(std::string_view name) {
  std::string key(name);
  std::transform(key.begin(), key.end(), key.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (key == "dummify" || key == "dummy") return RelationMode::kDummify;
  if (key == "markers" || key == "marker") return RelationMode::kMarkers;
  if (key == "original") return RelationMode::kOriginal;
  throw ConfigError("unknown relation mode '" + std::string(name) +
                    "' (expected dummify|markers|original)");
}

std::string TransformedText::text() const {
  std::string out;
  for (std::size_t i = 0; i < words.size(); ++i) {
    if (i > 0) out.push_back(' ');
    out += words[i];
  }
  return out;
}

std::string dummy_token(std::string_view entity_type) { return "$" + std::string(entity_type); }

TransformedText transform_relation(const RelationInstance& instance, RelationMode mode) {
  instance.validate();
  TransformedText out;
  const auto keep = [&](std::size_t w) {
    out.words.push_back(instance.words[w]);
    out.source_word.push_back(static_cast<std::int32_t>(w));
  };
  const auto insert = [&](std::string token) {
    out.words.push_back(std::move(token));
    out.source_word.push_back(-1);
  };
  const EntitySpan* which[2] = {&instance.e1, &instance.e2};
  for (std::size_t w = 0; w < instance.words.size(); ++w) {
    int entity = -1;
    for (int k = 0; k < 2; ++k) {
      if (w >= which[k]->start && w <= which[k]->end) entity = k;
    }
    if (entity < 0 || mode == RelationMode::kOriginal) {
      keep(w);
      continue;
    }
    const EntitySpan& span = *which[entity];
    if (mode == RelationMode::kDummify) {
      if (w == span.start) insert(dummy_token(span.type));
      continue;
    }
    if (w == span.start) insert(std::string(kMarkerTokens[2 * entity]));
    keep(w);
    if (w == span.end) insert(std::string(kMarkerTokens[2 * entity + 1]));
  }
  return out;
}

std::vector<std::string> reserved_tokens(RelationMode mode, std::span<const std::string> types) {
  std::vector<std::string> out;
  if (mode == RelationMode::kMarkers) {
    for (auto t : kMarkerTokens) out.emplace_back(t);
  } else if (mode == RelationMode::kDummify) {
    std::set<std::string> unique(types.begin(), types.end());
    for (const auto& t : unique) out.push_back(dummy_token(t));
  }
  return out;
}

Tokenizer with_reserved_tokens(const Tokenizer& tokenizer, std::span<const std::string> tokens) {
  std::vector<std::string> normalized;
  for (const auto& t : tokens) {
    std::string n = tokenizer.normalize(t);
    if (n.empty() || n.find(' ') != std::string::npos) {
      throw ConfigError("reserved token '" + t + "' does not normalize to a single chunk");
    }
    normalized.push_back(std::move(n));
  }
  auto vocab = std::make_shared<const Vocabulary>(tokenizer.vocab().with_added_tokens(normalized));
  TokenizerConfig config = tokenizer.config();
  for (const auto& t : tokens) config.protected_tokens.push_back(t);
  return Tokenizer(std::move(vocab), std::move(config));
}

// ---- ChemProt negative expansion -------------------------------------------

SplitMode parse_split(std::string_view name) {
  if (name == "train") return SplitMode::kTrain;
  if (name == "dev") return SplitMode::kDev;
  if (name == "test") return SplitMode::kTest;
  throw ConfigError("unknown split '" + std::string(name) + "' (expected train|dev|test)");
}

std::vector<RelationInstance> expand_negatives(std::span<const RelationSentence> sentences,
                                               std::span<const RelationInstance> labeled,
                                               SplitMode split, std::string_view negative_label) {
  std::map<std::string, std::size_t, std::less<>> sentence_of;
  for (std::size_t s = 0; s < sentences.size(); ++s) {
    if (!sentence_of.emplace(sentences[s].id, s).second) {
      throw DataError("duplicate sentence id '" + sentences[s].id + "'");
    }
  }
  const auto find_mention = [](const std::vector<Mention>& mentions, const EntitySpan& span) {
    for (std::size_t i = 0; i < mentions.size(); ++i) {
      if (mentions[i].span.start == span.start && mentions[i].span.end == span.end) return i;
    }
    return mentions.size();
  };

  // (sentence, chemical, protein) -> index into `labeled`
  std::map<std::tuple<std::size_t, std::size_t, std::size_t>, std::size_t> labels;
  for (std::size_t k = 0; k < labeled.size(); ++k) {
    const auto& inst = labeled[k];
    std::string_view sid = inst.id;
    auto it = sentence_of.find(sid);
    if (it == sentence_of.end()) {
      const auto dot = sid.rfind('.');
      if (dot != std::string_view::npos) it = sentence_of.find(sid.substr(0, dot));
    }
    if (it == sentence_of.end()) {
      throw DataError("labeled instance '" + inst.id + "' references an unknown sentence");
    }
    const RelationSentence& sent = sentences[it->second];
    const std::size_t c = find_mention(sent.chemicals, inst.e1);
    const std::size_t p = find_mention(sent.proteins, inst.e2);
    if (c == sent.chemicals.size() || p == sent.proteins.size()) {
      throw DataError("labeled instance '" + inst.id + "' references an unknown mention (" +
                      (c == sent.chemicals.size() ? "e1" : "e2") + ")");
    }
    if (!labels.emplace(std::make_tuple(it->second, c, p), k).second) {
      throw DataError("duplicate label for pair in instance '" + inst.id + "'");
    }
  }

  std::vector<RelationInstance> out;
  if (split == SplitMode::kTest) {
    out.assign(labeled.begin(), labeled.end());
    return out;
  }
  for (std::size_t s = 0; s < sentences.size(); ++s) {
    const auto& sent = sentences[s];
    for (std::size_t c = 0; c < sent.chemicals.size(); ++c) {
      for (std::size_t p = 0; p < sent.proteins.size(); ++p) {
        RelationInstance inst;
        inst.id = sent.id + "." + sent.chemicals[c].id + "." + sent.proteins[p].id;
        inst.words = sent.words;
        inst.e1 = sent.chemicals[c].span;
        inst.e2 = sent.proteins[p].span;
        const auto it = labels.find({s, c, p});
        inst.label = it == labels.end() ? std::string(negative_label) : labeled[it->second].label;
        out.push_back(std::move(inst));
      }
    }
  }
  return out;
}

// ---- Model inputs ----------------------------------------------------------

std::vector<std::int32_t> project_word_labels(const Encoding& encoding,
                                              std::span<const std::int32_t> word_labels) {
  std::vector<std::int32_t> out(encoding.size(), kIgnoreLabelId);
  std::int32_t previous = Encoding::kSpecialWord;
  for (std::size_t i = 0; i < encoding.size(); ++i) {
    const std::int32_t w = encoding.word_index[i];
    if (w != Encoding::kSpecialWord && w != previous) {
      if (static_cast<std::size_t>(w) >= word_labels.size()) {
        throw DataError("piece refers to word " + std::to_string(w) + " but only " +
                        std::to_string(word_labels.size()) + " word labels were given");
      }
      out[i] = word_labels[static_cast<std::size_t>(w)];
    }
    previous = w;
  }
  return out;
}

std::vector<std::int32_t> recover_word_labels(const Encoding& encoding,
                                              std::span<const std::int32_t> piece_labels) {
  std::vector<std::int32_t> out;
  std::int32_t previous = Encoding::kSpecialWord;
  for (std::size_t i = 0; i < encoding.size(); ++i) {
    const std::int32_t w = encoding.word_index[i];
    if (w != Encoding::kSpecialWord && w != previous) out.push_back(piece_labels[i]);
    previous = w;
  }
  return out;
}

namespace {

PreparedRecord prepare_ner(const TaggedSentence& s, std::size_t max_len, const Tokenizer& tok,
                           const PrepConfig& config) {
  if (s.words.size() != s.tags.size()) {
    throw DataError("sentence '" + s.id + "': " + std::to_string(s.words.size()) + " words but " +
                    std::to_string(s.tags.size()) + " tags");
  }
  const TagSequence source{infer_scheme(s.tags), s.tags};
  const auto spans = tags_to_spans(source, RepairMode::kConll, config.tag_options);
  const TagSequence tags = spans_to_tags(spans, s.words.size(), config.scheme, config.tag_options);

  std::vector<std::string> inventory = config.tag_labels;
  if (inventory.empty()) {
    std::vector<std::string> types;
    for (const auto& sp : spans) types.push_back(sp.type);
    inventory = tag_set(config.scheme, types);
  }
  std::vector<std::int32_t> word_labels;
  for (const auto& t : tags.tags) {
    const auto it = std::find(inventory.begin(), inventory.end(), t);
    if (it == inventory.end()) {
      throw DataError("sentence '" + s.id + "': tag '" + t + "' is not in the label inventory");
    }
    word_labels.push_back(static_cast<std::int32_t>(it - inventory.begin()));
  }
  PreparedRecord out;
  out.id = s.id;
  out.encoding = tok.encode_segment(tok.tokenize_words(s.words), max_len);
  out.piece_labels = project_word_labels(out.encoding, word_labels);
  out.word_tags = tags.tags;
  return out;
}

PreparedRecord prepare_pico(const PicoSentence& s, std::size_t max_len, const Tokenizer& tok) {
  s.labels.validate();
  if (s.labels.size() != s.words.size()) {
    throw DataError("sentence '" + s.id + "': " + std::to_string(s.words.size()) + " words but " +
                    std::to_string(s.labels.size()) + " PICO labels");
  }
  std::vector<std::int32_t> word_labels(s.words.size(), 0);
  for (std::size_t e = 0; e < 3; ++e) {
    for (std::size_t w = 0; w < s.words.size(); ++w) {
      if (s.labels.elements[e][w]) word_labels[w] |= 1 << e;
    }
  }
  PreparedRecord out;
  out.id = s.id;
  out.encoding = tok.encode_segment(tok.tokenize_words(s.words), max_len);
  out.piece_labels = project_word_labels(out.encoding, word_labels);
  out.word_tags = from_pico(s).tags;
  return out;
}

}  // namespace

PreparedRecord prepare_task_encoding(Dataset dataset, const TaskRecord& record,
                                     const Tokenizer& tokenizer, const PrepConfig& config) {
  const DatasetInfo& info = dataset_info(dataset);
  const std::size_t max_len = task_max_length(dataset, config.default_max_len);
  const auto mismatch = [&](std::string_view got) {
    return DataError(std::string(info.name) + " expects " + std::string(to_string(info.task)) +
                     " records, got a " + std::string(got) + " record");
  };

  switch (info.task) {
    case TaskType::kNer:
      if (const auto* r = std::get_if<TaggedSentence>(&record)) {
        return prepare_ner(*r, max_len, tokenizer, config);
      }
      throw mismatch("non-NER");
    case TaskType::kPico:
      if (const auto* r = std::get_if<PicoSentence>(&record)) {
        return prepare_pico(*r, max_len, tokenizer);
      }
      throw mismatch("non-PICO");
    case TaskType::kRelation:
      if (const auto* r = std::get_if<RelationInstance>(&record)) {
        PreparedRecord out;
        out.id = r->id;
        out.encoding = tokenizer.encode(transform_relation(*r, config.relation_mode).text(), max_len);
        out.target = r->label;
        return out;
      }
      throw mismatch("non-relation");
    case TaskType::kSimilarity:
      if (const auto* r = std::get_if<SimilarityRecord>(&record)) {
        PreparedRecord out;
        out.id = r->id;
        out.encoding = tokenizer.encode_pair(r->a, r->b, max_len);
        out.target = r->score;
        return out;
      }
      throw mismatch("non-similarity");
    case TaskType::kClassification:
      if (const auto* r = std::get_if<ClassificationRecord>(&record)) {
        PreparedRecord out;
        out.id = r->id;
        out.encoding = tokenizer.encode(r->text, max_len);
        out.target = ordered_json::array();
        for (bool b : r->labels) out.target.push_back(b);
        return out;
      }
      throw mismatch("non-classification");
    case TaskType::kQa:
      if (const auto* r = std::get_if<QaRecord>(&record)) {
        PreparedRecord out;
        out.id = r->id;
        out.encoding = tokenizer.encode_pair(r->question, r->text, max_len);
        out.target = r->label;
        return out;
      }
      throw mismatch("non-QA");
  }
  throw mismatch("unknown");
}

ordered_json to_json(const PreparedRecord& record) {
  ordered_json j;
  j["id"] = record.id;
  j["pieces"] = record.encoding.pieces;
  j["ids"] = record.encoding.ids;
  j["segments"] = record.encoding.segment_ids;
  j["word_index"] = record.encoding.word_index;
  if (!record.piece_labels.empty()) j["labels"] = record.piece_labels;
  if (!record.word_tags.empty()) j["tags"] = record.word_tags;
  if (!record.target.is_null()) j["target"] = record.target;
  return j;
}

// ---- File formats ----------------------------------------------------------

std::vector<TaggedSentence> read_conll(std::istream& in, std::string_view source) {
  std::vector<TaggedSentence> out;
  TaggedSentence current;
  const auto flush = [&] {
    if (current.words.empty()) return;
    current.id = "s" + std::to_string(out.size());
    out.push_back(std::move(current));
    current = {};
  };
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.starts_with("-DOCSTART-")) {
      flush();
      continue;
    }
    const auto tab = line.find('\t');
    if (tab == std::string::npos || tab == 0 || line.find('\t', tab + 1) != std::string::npos) {
      throw FormatError(std::string(source) + ":" + std::to_string(lineno) +
                        ": expected 'word<TAB>tag'");
    }
    current.words.push_back(line.substr(0, tab));
    current.tags.push_back(line.substr(tab + 1));
    if (current.tags.back().empty()) {
      throw FormatError(std::string(source) + ":" + std::to_string(lineno) + ": empty tag");
    }
  }
  flush();
  return out;
}

std::vector<TaggedSentence> read_conll(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  return read_conll(in, path.string());
}

void write_conll(std::ostream& out, std::span<const TaggedSentence> sentences) {
  for (std::size_t s = 0; s < sentences.size(); ++s) {
    if (s > 0) out << '\n';
    const auto& sent = sentences[s];
    for (std::size_t w = 0; w < sent.words.size(); ++w) {
      out << sent.words[w] << '\t' << sent.tags[w] << '\n';
    }
  }
}

PicoSentence to_pico(const TaggedSentence& s) {
  PicoSentence out{s.id, s.words, {}};
  for (auto& e : out.labels.elements) e.assign(s.words.size(), false);
  for (std::size_t w = 0; w < s.tags.size(); ++w) {
    if (s.tags[w] == "O") continue;
    std::string_view rest = s.tags[w];
    while (!rest.empty()) {
      const auto bar = rest.find('|');
      const std::string_view part = rest.substr(0, bar);
      const auto it = std::find(kPicoTags.begin(), kPicoTags.end(), part);
      if (it == kPicoTags.end()) {
        throw DataError("sentence '" + s.id + "' word " + std::to_string(w) +
                        ": unknown PICO tag '" + std::string(part) + "'");
      }
      out.labels.elements[static_cast<std::size_t>(it - kPicoTags.begin())][w] = true;
      rest = bar == std::string_view::npos ? std::string_view() : rest.substr(bar + 1);
    }
  }
  return out;
}

TaggedSentence from_pico(const PicoSentence& s) {
  s.labels.validate();
  TaggedSentence out{s.id, s.words, {}};
  for (std::size_t w = 0; w < s.labels.size(); ++w) {
    std::string tag;
    for (std::size_t e = 0; e < 3; ++e) {
      if (!s.labels.elements[e][w]) continue;
      if (!tag.empty()) tag.push_back('|');
      tag += kPicoTags[e];
    }
    out.tags.push_back(tag.empty() ? "O" : tag);
  }
  return out;
}

namespace {

std::vector<std::string> split_words(std::string_view text) {
  std::vector<std::string> out;
  std::istringstream in{std::string(text)};
  std::string w;
  while (in >> w) out.push_back(w);
  return out;
}

EntitySpan parse_span(const json& j, std::string_view key) {
  const json& e = j.at(std::string(key));
  return EntitySpan{e.at("start").get<std::size_t>(), e.at("end").get<std::size_t>(),
                    e.at("type").get<std::string>()};
}

std::string id_of(const json& j) {
  const json& id = j.at("id");
  return id.is_string() ? id.get<std::string>() : id.dump();
}

}  // namespace

TaskRecord parse_task_record(TaskType task, const json& j, std::string_view where) {
  try {
    switch (task) {
      case TaskType::kNer:
      case TaskType::kPico: {
        TaggedSentence s{id_of(j), j.at("words").get<std::vector<std::string>>(),
                         j.at("tags").get<std::vector<std::string>>()};
        if (s.words.size() != s.tags.size()) throw DataError("words/tags length mismatch");
        if (task == TaskType::kPico) return to_pico(s);
        return s;
      }
      case TaskType::kRelation: {
        RelationInstance r{id_of(j), split_words(j.at("text").get<std::string>()),
                           parse_span(j, "e1"), parse_span(j, "e2"),
                           j.at("label").get<std::string>()};
        r.validate();
        return r;
      }
      case TaskType::kSimilarity:
        return SimilarityRecord{id_of(j), j.at("a").get<std::string>(), j.at("b").get<std::string>(),
                                j.at("score").get<double>()};
      case TaskType::kQa:
        return QaRecord{id_of(j), j.at("question").get<std::string>(),
                        j.at("text").get<std::string>(), j.at("label").get<std::string>()};
      case TaskType::kClassification: {
        ClassificationRecord r{id_of(j), j.at("text").get<std::string>(), {}};
        for (const auto& b : j.at("labels")) r.labels.push_back(b.is_boolean() ? b.get<bool>() : b.get<int>() != 0);
        return r;
      }
    }
  } catch (const json::exception& e) {
    throw FormatError(std::string(where) + ": " + e.what());
  } catch (const DataError& e) {
    throw DataError(std::string(where) + ": " + e.what());
  }
  throw FormatError(std::string(where) + ": unsupported task");
}

std::vector<TaskRecord> read_task_records(TaskType task, const std::filesystem::path& path) {
  const auto ext = path.extension().string();
  if ((task == TaskType::kNer || task == TaskType::kPico) && ext != ".jsonl" && ext != ".json") {
    std::vector<TaskRecord> out;
    for (auto& s : read_conll(path)) {
      if (task == TaskType::kPico) {
        out.emplace_back(to_pico(s));
      } else {
        out.emplace_back(std::move(s));
      }
    }
    return out;
  }
  std::vector<TaskRecord> out;
  io::for_each_line(path, [&](std::string_view line, std::size_t lineno) {
    if (line.find_first_not_of(" \t") == std::string_view::npos) return;
    const std::string where = path.string() + ":" + std::to_string(lineno);
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw FormatError(where + ": " + e.what());
    }
    out.push_back(parse_task_record(task, j, where));
  });
  return out;
}

std::vector<std::vector<EntitySpan>> sentence_spans(std::span<const TaggedSentence> sentences,
                                                    TagScheme scheme, const TagOptions& options) {
  std::vector<std::vector<EntitySpan>> out;
  out.reserve(sentences.size());
  for (const auto& s : sentences) {
    out.push_back(tags_to_spans(TagSequence{scheme, s.tags}, RepairMode::kConll, options));
  }
  return out;
}

}  // namespace blurbkit
