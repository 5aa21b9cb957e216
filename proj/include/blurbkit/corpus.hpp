#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "blurbkit/text.hpp"

namespace blurbkit {

struct Sentence {
  std::string text;
  // Byte range into the owning document's text.
  std::size_t begin = 0;
  std::size_t end = 0;

  bool operator==(const Sentence&) const = default;
};

struct Document {
  std::string id;
  std::string text;  // NFC-normalized record text
  std::vector<Sentence> sentences;
  std::size_t word_count = 0;

  bool operator==(const Document&) const = default;
};

struct SentenceSplitOptions {
  // Matched case-sensitively against the text ending at the candidate
  // boundary; a match suppresses the split.
  std::vector<std::string> abbreviations = default_abbreviations();
  // Treat a lone uppercase letter followed by '.' ("E.", "J.") as an initial.
  bool protect_initials = true;

  static std::vector<std::string> default_abbreviations();
};

// Rule-based segmentation: a boundary follows [.?!] (plus any closing quotes
// or brackets) when whitespace and then an uppercase letter or digit follow,
// unless the text before the boundary ends in a protected abbreviation.
std::vector<Sentence> split_sentences(std::string_view text,
                                      const SentenceSplitOptions& options = {});

struct CorpusOptions {
  std::size_t min_words = 0;
  std::size_t workers = 1;
  SentenceSplitOptions sentences;
};

struct CorpusStats {
  std::size_t records = 0;
  std::size_t accepted = 0;
  std::size_t skipped_short = 0;
  std::size_t malformed = 0;
  std::vector<std::string> warnings;  // "line N: reason"
};

// One document per line, optional "id<TAB>" prefix. Blank lines are not
// records. Documents shorter than min_words are counted and skipped; malformed
// records (invalid UTF-8, empty id) produce a warning and are skipped.
std::vector<Document> load_corpus(const std::filesystem::path& path,
                                  const CorpusOptions& options, CorpusStats* stats = nullptr);
std::vector<Document> load_corpus(const std::filesystem::path& path, std::size_t min_words,
                                  CorpusStats* stats = nullptr);

// Streaming variant: documents are delivered in file order.
void for_each_document(const std::filesystem::path& path, const CorpusOptions& options,
                       const std::function<void(Document&&)>& sink,
                       CorpusStats* stats = nullptr);

Document make_document(std::string id, std::string_view text,
                       const SentenceSplitOptions& options = {});

class WordFrequencyTable {
 public:
  using Map = std::map<std::string, std::int64_t, std::less<>>;

  void add(std::string_view word, std::int64_t count = 1);
  void merge(const WordFrequencyTable& other);

  std::int64_t count(std::string_view word) const;
  std::size_t size() const { return counts_.size(); }
  bool empty() const { return counts_.empty(); }
  std::int64_t total() const;
  const Map& counts() const { return counts_; }

  // (count desc, word asc).
  std::vector<std::pair<std::string, std::int64_t>> sorted_by_count() const;

  // "word<TAB>count" lines in sorted_by_count() order.
  void write(std::ostream& out) const;
  static WordFrequencyTable read(const std::filesystem::path& path);

  bool operator==(const WordFrequencyTable&) const = default;

 private:
  Map counts_;
};

// Keys are normalized pre-tokens (see normalize / pre_tokenize).
WordFrequencyTable build_word_frequencies(std::span<const Document> documents, Casing casing,
                                          std::size_t workers = 1);
WordFrequencyTable build_word_frequencies(std::span<const std::string> texts, Casing casing,
                                          std::size_t workers = 1);

}  // namespace blurbkit
