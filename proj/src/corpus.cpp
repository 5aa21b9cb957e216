#include "blurbkit/corpus.hpp"

#include <algorithm>
#include <charconv>
#include <ostream>

#include "blurbkit/error.hpp"
#include "blurbkit/io.hpp"
#include "blurbkit/parallel.hpp"
#include "blurbkit/unicode.hpp"

namespace blurbkit {

std::vector<std::string> SentenceSplitOptions::default_abbreviations() {
  return {"e.g.", "i.e.", "vs.", "Fig.", "Figs.", "et al.", "cf.", "approx.", "ca.",
          "Dr.",  "Prof.", "No.", "Eq.",  "Ref.",  "resp.",  "spp.", "sp."};
}

namespace {

bool is_closer(char32_t cp) {
  switch (cp) {
    case ')': case ']': case '"': case '\'':
    case 0x2019: case 0x201D: case 0x00BB:
      return true;
    default:
      return false;
  }
}

bool protected_boundary(std::string_view before, const SentenceSplitOptions& options) {
  // `before` ends with the terminal '.'.
  const auto preceded_by_break = [&](std::size_t start) {
    return start == 0 || before[start - 1] == ' ' || before[start - 1] == '\t' ||
           before[start - 1] == '(';
  };
  for (const auto& abbr : options.abbreviations) {
    if (before.size() >= abbr.size() && before.ends_with(abbr) &&
        preceded_by_break(before.size() - abbr.size())) {
      return true;
    }
  }
  if (options.protect_initials && before.size() >= 2) {
    // Find the code point preceding the '.'.
    std::size_t start = before.size() - 1;
    do {
      --start;
    } while (start > 0 && (static_cast<unsigned char>(before[start]) & 0xC0) == 0x80);
    std::size_t pos = start;
    const char32_t cp = unicode::next_code_point(before, pos);
    if (pos == before.size() - 1 && unicode::is_upper(cp) && preceded_by_break(start)) {
      return true;
    }
  }
  return false;
}

}  // namespace

std::vector<Sentence> split_sentences(std::string_view text, const SentenceSplitOptions& options) {
  std::vector<Sentence> out;
  const auto skip_spaces = [&](std::size_t pos) {
    while (pos < text.size()) {
      std::size_t next = pos;
      if (!unicode::is_whitespace(unicode::next_code_point(text, next))) break;
      pos = next;
    }
    return pos;
  };
  const auto emit = [&](std::size_t begin, std::size_t end) {
    // Trim trailing whitespace.
    while (end > begin && (text[end - 1] == ' ' || text[end - 1] == '\t' ||
                           text[end - 1] == '\n' || text[end - 1] == '\r')) {
      --end;
    }
    if (end > begin) out.push_back(Sentence{std::string(text.substr(begin, end - begin)), begin, end});
  };

  std::size_t start = skip_spaces(0);
  std::size_t pos = start;
  while (pos < text.size()) {
    const char c = text[pos];
    if (c != '.' && c != '?' && c != '!') {
      unicode::next_code_point(text, pos);
      continue;
    }
    std::size_t end = pos + 1;
    while (end < text.size()) {
      std::size_t next = end;
      if (!is_closer(unicode::next_code_point(text, next))) break;
      end = next;
    }
    const std::size_t next_start = skip_spaces(end);
    bool boundary = next_start > end && next_start < text.size();
    if (boundary) {
      std::size_t peek = next_start;
      const char32_t cp = unicode::next_code_point(text, peek);
      boundary = unicode::is_upper(cp) || unicode::is_digit(cp);
    }
    if (boundary && c == '.' && protected_boundary(text.substr(0, pos + 1), options)) {
      boundary = false;
    }
    if (boundary) {
      emit(start, end);
      start = next_start;
      pos = next_start;
    } else {
      pos = end;
    }
  }
  if (start < text.size()) emit(start, text.size());
  return out;
}

Document make_document(std::string id, std::string_view text,
                       const SentenceSplitOptions& options) {
  Document doc;
  doc.id = std::move(id);
  doc.text = unicode::to_nfc(text);
  doc.sentences = split_sentences(doc.text, options);
  for (const auto& s : doc.sentences) doc.word_count += count_whitespace_words(s.text);
  return doc;
}

namespace {

struct ParsedRecord {
  enum class Kind { kBlank, kMalformed, kShort, kAccepted } kind = Kind::kBlank;
  std::string reason;
  Document document;
};

ParsedRecord parse_record(std::string_view line, std::size_t line_number,
                          const CorpusOptions& options) {
  ParsedRecord rec;
  if (line.find_first_not_of(" \t") == std::string_view::npos) return rec;
  if (!unicode::is_valid_utf8(line)) {
    rec.kind = ParsedRecord::Kind::kMalformed;
    rec.reason = "invalid UTF-8";
    return rec;
  }
  std::string id;
  std::string_view body = line;
  if (const auto tab = line.find('\t'); tab != std::string_view::npos) {
    id = std::string(line.substr(0, tab));
    body = line.substr(tab + 1);
    if (id.empty()) {
      rec.kind = ParsedRecord::Kind::kMalformed;
      rec.reason = "empty id before tab";
      return rec;
    }
  } else {
    id = std::to_string(line_number);
  }
  rec.document = make_document(std::move(id), body, options.sentences);
  rec.kind = rec.document.word_count < options.min_words ? ParsedRecord::Kind::kShort
                                                         : ParsedRecord::Kind::kAccepted;
  return rec;
}

}  // namespace

void for_each_document(const std::filesystem::path& path, const CorpusOptions& options,
                       const std::function<void(Document&&)>& sink, CorpusStats* stats) {
  CorpusStats local;
  constexpr std::size_t kBatch = 4096;
  std::vector<std::pair<std::string, std::size_t>> batch;
  batch.reserve(kBatch);

  const auto drain = [&] {
    std::vector<ParsedRecord> parsed(batch.size());
    run_sharded(batch.size(), options.workers * 4, options.workers,
                [&](std::size_t, std::size_t b, std::size_t e) {
                  for (std::size_t i = b; i < e; ++i) {
                    parsed[i] = parse_record(batch[i].first, batch[i].second, options);
                  }
                });
    for (std::size_t i = 0; i < parsed.size(); ++i) {
      auto& rec = parsed[i];
      switch (rec.kind) {
        case ParsedRecord::Kind::kBlank:
          break;
        case ParsedRecord::Kind::kMalformed:
          ++local.records;
          ++local.malformed;
          local.warnings.push_back("line " + std::to_string(batch[i].second) + ": " + rec.reason);
          break;
        case ParsedRecord::Kind::kShort:
          ++local.records;
          ++local.skipped_short;
          break;
        case ParsedRecord::Kind::kAccepted:
          ++local.records;
          ++local.accepted;
          sink(std::move(rec.document));
          break;
      }
    }
    batch.clear();
  };

  io::for_each_line(path, [&](std::string_view line, std::size_t number) {
    batch.emplace_back(std::string(line), number);
    if (batch.size() == kBatch) drain();
  });
  drain();
  if (stats != nullptr) *stats = std::move(local);
}

std::vector<Document> load_corpus(const std::filesystem::path& path, const CorpusOptions& options,
                                  CorpusStats* stats) {
  std::vector<Document> docs;
  for_each_document(path, options, [&](Document&& d) { docs.push_back(std::move(d)); }, stats);
  return docs;
}

std::vector<Document> load_corpus(const std::filesystem::path& path, std::size_t min_words,
                                  CorpusStats* stats) {
  CorpusOptions options;
  options.min_words = min_words;
  return load_corpus(path, options, stats);
}

void WordFrequencyTable::add(std::string_view word, std::int64_t count) {
  if (word.empty()) throw DataError("word frequency table keys must be non-empty");
  if (count < 1) throw DataError("word frequency counts must be positive");
  auto it = counts_.find(word);
  if (it == counts_.end()) {
    counts_.emplace(std::string(word), count);
  } else {
    it->second += count;
  }
}

void WordFrequencyTable::merge(const WordFrequencyTable& other) {
  for (const auto& [w, c] : other.counts_) add(w, c);
}

std::int64_t WordFrequencyTable::count(std::string_view word) const {
  auto it = counts_.find(word);
  return it == counts_.end() ? 0 : it->second;
}

std::int64_t WordFrequencyTable::total() const {
  std::int64_t t = 0;
  for (const auto& [w, c] : counts_) t += c;
  return t;
}

std::vector<std::pair<std::string, std::int64_t>> WordFrequencyTable::sorted_by_count() const {
  std::vector<std::pair<std::string, std::int64_t>> v(counts_.begin(), counts_.end());
  std::stable_sort(v.begin(), v.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  return v;
}

void WordFrequencyTable::write(std::ostream& out) const {
  for (const auto& [w, c] : sorted_by_count()) out << w << '\t' << c << '\n';
}

WordFrequencyTable WordFrequencyTable::read(const std::filesystem::path& path) {
  WordFrequencyTable table;
  io::for_each_line(path, [&](std::string_view line, std::size_t number) {
    if (line.empty()) return;
    const auto tab = line.rfind('\t');
    std::int64_t count = 0;
    if (tab == std::string_view::npos || tab == 0) {
      throw FormatError(path.string() + ":" + std::to_string(number) +
                        ": expected 'word<TAB>count'");
    }
    const auto digits = line.substr(tab + 1);
    const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), count);
    if (ec != std::errc{} || ptr != digits.data() + digits.size() || count < 1) {
      throw FormatError(path.string() + ":" + std::to_string(number) + ": bad count");
    }
    table.add(line.substr(0, tab), count);
  });
  return table;
}

namespace {

template <typename TextOf>
WordFrequencyTable count_words(std::size_t n, TextOf text_of, Casing casing, std::size_t workers) {
  const std::size_t shards = std::max<std::size_t>(1, workers) * 4;
  std::vector<WordFrequencyTable> partial(shards);
  run_sharded(n, shards, workers, [&](std::size_t s, std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) {
      const std::string normalized = normalize(text_of(i), casing);
      for (const auto& w : pre_tokenize(normalized)) partial[s].add(w.text);
    }
  });
  WordFrequencyTable table;
  for (const auto& p : partial) table.merge(p);
  return table;
}

}  // namespace

WordFrequencyTable build_word_frequencies(std::span<const Document> documents, Casing casing,
                                          std::size_t workers) {
  return count_words(
      documents.size(), [&](std::size_t i) -> std::string_view { return documents[i].text; },
      casing, workers);
}

WordFrequencyTable build_word_frequencies(std::span<const std::string> texts, Casing casing,
                                          std::size_t workers) {
  return count_words(
      texts.size(), [&](std::size_t i) -> std::string_view { return texts[i]; }, casing, workers);
}

}  // namespace blurbkit
