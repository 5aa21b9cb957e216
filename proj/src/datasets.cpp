#include "blurbkit/datasets.hpp"

#include <cctype>
#include <string>

#include "blurbkit/error.hpp"

namespace blurbkit {

const std::array<DatasetInfo, kDatasetCount>& blurb_datasets() {
  static const std::array<DatasetInfo, kDatasetCount> table{{
      {Dataset::kBC5Chem, "BC5-chem", TaskType::kNer, "entity_f1", std::nullopt},
      {Dataset::kBC5Disease, "BC5-disease", TaskType::kNer, "entity_f1", std::nullopt},
      {Dataset::kNCBIDisease, "NCBI-disease", TaskType::kNer, "entity_f1", std::nullopt},
      {Dataset::kBC2GM, "BC2GM", TaskType::kNer, "entity_f1", std::nullopt},
      {Dataset::kJNLPBA, "JNLPBA", TaskType::kNer, "entity_f1", std::nullopt},
      {Dataset::kEbmPico, "EBM PICO", TaskType::kPico, "word_macro_f1", std::nullopt},
      {Dataset::kChemProt, "ChemProt", TaskType::kRelation, "micro_f1", 256},
      {Dataset::kDDI, "DDI", TaskType::kRelation, "micro_f1", 256},
      {Dataset::kGAD, "GAD", TaskType::kRelation, "micro_f1", 128},
      {Dataset::kBIOSSES, "BIOSSES", TaskType::kSimilarity, "pearson", std::nullopt},
      {Dataset::kHoC, "HoC", TaskType::kClassification, "micro_f1", std::nullopt},
      {Dataset::kPubMedQA, "PubMedQA", TaskType::kQa, "accuracy", 512},
      {Dataset::kBioASQ, "BioASQ", TaskType::kQa, "accuracy", 512},
  }};
  return table;
}

const DatasetInfo& dataset_info(Dataset dataset) {
  return blurb_datasets()[static_cast<std::size_t>(dataset)];
}

namespace {

std::string fold(std::string_view s) {
  std::string out;
  for (unsigned char c : s) {
    if (std::isalnum(c)) out.push_back(static_cast<char>(std::tolower(c)));
  }
  return out;
}

}  // namespace

Dataset parse_dataset(std::string_view name) {
  std::string key = fold(name);
  if (key.starts_with("bc5cdr")) key = "bc5" + key.substr(6);
  if (key == "ebmnlp" || key == "pico") key = "ebmpico";
  for (const auto& info : blurb_datasets()) {
    if (fold(info.name) == key) return info.dataset;
  }
  throw ConfigError("unknown BLURB dataset '" + std::string(name) + "'");
}

std::string_view to_string(TaskType task) {
  switch (task) {
    case TaskType::kNer: return "ner";
    case TaskType::kPico: return "pico";
    case TaskType::kRelation: return "relation";
    case TaskType::kSimilarity: return "similarity";
    case TaskType::kClassification: return "classification";
    case TaskType::kQa: return "qa";
  }
  return "?";
}

std::string_view task_display_name(TaskType task) {
  switch (task) {
    case TaskType::kNer: return "NER";
    case TaskType::kPico: return "PICO";
    case TaskType::kRelation: return "RelationExtraction";
    case TaskType::kSimilarity: return "SentenceSimilarity";
    case TaskType::kClassification: return "DocumentClassification";
    case TaskType::kQa: return "QuestionAnswering";
  }
  return "?";
}

TaskType parse_task_type(std::string_view name) {
  const std::string key = fold(name);
  if (key == "ner") return TaskType::kNer;
  if (key == "pico") return TaskType::kPico;
  if (key == "relation" || key == "re" || key == "relationextraction") return TaskType::kRelation;
  if (key == "similarity" || key == "sentencesimilarity") return TaskType::kSimilarity;
  if (key == "classification" || key == "documentclassification") return TaskType::kClassification;
  if (key == "qa" || key == "questionanswering") return TaskType::kQa;
  throw ConfigError("unknown task type '" + std::string(name) +
                    "' (expected ner|pico|relation|similarity|classification|qa)");
}

std::size_t task_max_length(Dataset dataset, std::size_t fallback) {
  return dataset_info(dataset).max_len.value_or(fallback);
}

}  // namespace blurbkit
