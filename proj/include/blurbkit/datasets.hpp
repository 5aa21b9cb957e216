#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string_view>

namespace blurbkit {

enum class TaskType { kNer, kPico, kRelation, kSimilarity, kClassification, kQa };

enum class Dataset {
  kBC5Chem,
  kBC5Disease,
  kNCBIDisease,
  kBC2GM,
  kJNLPBA,
  kEbmPico,
  kChemProt,
  kDDI,
  kGAD,
  kBIOSSES,
  kHoC,
  kPubMedQA,
  kBioASQ,
};

inline constexpr std::size_t kDatasetCount = 13;
inline constexpr std::size_t kTaskTypeCount = 6;

struct DatasetInfo {
  Dataset dataset;
  std::string_view name;    // canonical display name
  TaskType task;
  std::string_view metric;  // entity_f1 | word_macro_f1 | micro_f1 | pearson | accuracy
  std::optional<std::size_t> max_len;  // task-specific input length, if fixed
};

const std::array<DatasetInfo, kDatasetCount>& blurb_datasets();
const DatasetInfo& dataset_info(Dataset dataset);

// Case-, space- and punctuation-insensitive ("bc5-chem", "BC5CDR-chem" and
// "BC5 chem" all resolve). Throws ConfigError on unknown names.
Dataset parse_dataset(std::string_view name);

std::string_view to_string(TaskType task);
std::string_view task_display_name(TaskType task);
TaskType parse_task_type(std::string_view name);

// Task max length where the benchmark fixes one, else `fallback`.
std::size_t task_max_length(Dataset dataset, std::size_t fallback);

}  // namespace blurbkit
