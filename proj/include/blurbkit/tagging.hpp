#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace blurbkit {

// Inclusive word range with an entity type.
struct EntitySpan {
  std::size_t start = 0;
  std::size_t end = 0;
  std::string type;

  auto operator<=>(const EntitySpan&) const = default;
};

enum class TagScheme { kBIO, kBIOUL, kIO };

std::string_view to_string(TagScheme scheme);
TagScheme parse_scheme(std::string_view name);

struct TagSequence {
  TagScheme scheme = TagScheme::kBIO;
  std::vector<std::string> tags;

  bool operator==(const TagSequence&) const = default;
};

struct TagOptions {
  // BIOUL only: use U for the last word and L for single-word entities
  // instead of the conventional L = last, U = unit.
  bool swapped_bioul_letters = false;
};

enum class RepairMode { kStrict, kConll };

// Throws DataError for overlapping or out-of-range spans. IO cannot separate
// adjacent same-type spans; they come back merged from tags_to_spans.
TagSequence spans_to_tags(std::vector<EntitySpan> spans, std::size_t n_words, TagScheme scheme,
                          const TagOptions& options = {});

// Strict mode throws DataError naming the first violating index. CoNLL mode
// starts a new entity at any continuation tag that cannot extend the open one.
std::vector<EntitySpan> tags_to_spans(const TagSequence& tags, RepairMode mode = RepairMode::kStrict,
                                      const TagOptions& options = {});

struct SchemeConversion {
  TagSequence tags;
  bool merged = false;  // adjacent same-type entities collapsed (lossy, IO only)
};

SchemeConversion convert_scheme(const TagSequence& tags, TagScheme to,
                                const TagOptions& options = {});

// BIOUL if any L-/U- tag occurs, else BIO if any B- tag occurs, else IO.
TagScheme infer_scheme(std::span<const std::string> tags);

// Sorted tag inventory for a scheme over the given entity types ("O" first).
std::vector<std::string> tag_set(TagScheme scheme, std::vector<std::string> types);

}  // namespace blurbkit
