#include "blurbkit/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "blurbkit/error.hpp"

namespace blurbkit {

using nlohmann::ordered_json;

void CompensatedSum::add(double x) {
  const double t = sum_ + x;
  if (std::abs(sum_) >= std::abs(x)) {
    compensation_ += (sum_ - t) + x;
  } else {
    compensation_ += (x - t) + sum_;
  }
  sum_ = t;
}

const std::vector<std::string>& probe_terms() {
  static const std::vector<std::string> terms{
      "diabetes",      "leukemia",      "lithium",         "insulin",   "DNA",
      "promoter",      "hypertension",  "nephropathy",     "lymphoma",  "lidocaine",
      "oropharyngeal", "cardiomyocyte", "chloramphenicol", "RecA",      "acetyltransferase",
      "clonidine",     "naloxone"};
  return terms;
}

FragmentationReport fragmentation_report(const Tokenizer& tokenizer,
                                         std::span<const std::string> terms) {
  if (terms.empty()) throw ConfigError("fragmentation report needs at least one term");
  const auto& unk = tokenizer.vocab().token(tokenizer.vocab().unk_id());
  FragmentationReport r;
  CompensatedSum pieces;
  std::size_t unk_terms = 0;
  for (const auto& term : terms) {
    TermFragmentation t;
    t.term = term;
    t.normalized = tokenizer.normalize(term);
    t.pieces = tokenizer.tokenize(term).pieces;
    t.whole = t.pieces.size() == 1 && t.pieces[0] == t.normalized;
    t.unk = !t.pieces.empty() &&
            std::all_of(t.pieces.begin(), t.pieces.end(), [&](const auto& p) { return p == unk; });
    pieces.add(static_cast<double>(t.pieces.size()));
    r.whole_count += t.whole;
    unk_terms += t.unk;
    r.terms.push_back(std::move(t));
  }
  const auto n = static_cast<double>(terms.size());
  r.mean_piece_count = pieces.value() / n;
  r.whole_fraction = static_cast<double>(r.whole_count) / n;
  r.unk_fraction = static_cast<double>(unk_terms) / n;
  return r;
}

ordered_json FragmentationReport::to_json() const {
  ordered_json j;
  ordered_json arr = ordered_json::array();
  for (const auto& t : terms) {
    arr.push_back({{"term", t.term},
                   {"pieces", t.pieces},
                   {"piece_count", t.pieces.size()},
                   {"in_vocab_whole", t.whole}});
  }
  j["terms"] = arr;
  j["mean_piece_count"] = mean_piece_count;
  j["whole_fraction"] = whole_fraction;
  j["unk_fraction"] = unk_fraction;
  return j;
}

namespace {

std::string join_pieces(const std::vector<std::string>& pieces) {
  std::string out;
  for (std::size_t i = 0; i < pieces.size(); ++i) {
    if (i > 0) out += ' ';
    out += pieces[i];
  }
  return out;
}

std::string pad(std::string s, std::size_t width) {
  if (s.size() < width) s.append(width - s.size(), ' ');
  return s;
}

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

}  // namespace

std::string FragmentationReport::to_text() const {
  std::size_t width = 4;
  for (const auto& t : terms) width = std::max(width, t.term.size());
  std::ostringstream out;
  out << pad("term", width) << "  whole  n  pieces\n";
  for (const auto& t : terms) {
    out << pad(t.term, width) << "  " << pad(t.whole ? "yes" : "no", 5) << "  "
        << t.pieces.size() << "  [" << join_pieces(t.pieces) << "]\n";
  }
  out << "mean pieces " << fixed(mean_piece_count, 3) << ", whole " << whole_count << "/"
      << terms.size() << ", unk " << fixed(100.0 * unk_fraction, 1) << "%\n";
  return out.str();
}

ordered_json LengthReport::to_json() const {
  return ordered_json{{"corpus", corpus_id},        {"vocab", vocab_id},
                      {"records", records},         {"empty_records", empty_records},
                      {"total_pieces", total_pieces}, {"mean", mean}};
}

namespace {

LengthReport finish(CompensatedSum sum, std::size_t records, std::size_t empty) {
  LengthReport r;
  r.records = records;
  r.empty_records = empty;
  r.total_pieces = sum.value();
  r.mean = records == 0 ? 0.0 : r.total_pieces / static_cast<double>(records);
  return r;
}

}  // namespace

LengthReport avg_length(const Tokenizer& tokenizer, std::span<const std::string> texts) {
  CompensatedSum sum;
  std::size_t empty = 0;
  for (const auto& text : texts) {
    const std::size_t n = tokenizer.tokenize(text).size();
    empty += n == 0;
    sum.add(static_cast<double>(n));
  }
  return finish(sum, texts.size(), empty);
}

LengthReport avg_length(const Tokenizer& tokenizer, std::span<const TaskRecord> records,
                        RelationMode mode) {
  CompensatedSum sum;
  std::size_t empty = 0;
  for (const auto& record : records) {
    const std::size_t n = std::visit(
        [&](const auto& r) -> std::size_t {
          using T = std::decay_t<decltype(r)>;
          if constexpr (std::is_same_v<T, TaggedSentence> || std::is_same_v<T, PicoSentence>) {
            return tokenizer.tokenize_words(r.words).size();
          } else if constexpr (std::is_same_v<T, RelationInstance>) {
            return tokenizer.tokenize(transform_relation(r, mode).text()).size();
          } else if constexpr (std::is_same_v<T, SimilarityRecord>) {
            return tokenizer.tokenize(r.a).size() + tokenizer.tokenize(r.b).size();
          } else if constexpr (std::is_same_v<T, QaRecord>) {
            return tokenizer.tokenize(r.question).size() + tokenizer.tokenize(r.text).size();
          } else {
            return tokenizer.tokenize(r.text).size();
          }
        },
        record);
    empty += n == 0;
    sum.add(static_cast<double>(n));
  }
  return finish(sum, records.size(), empty);
}

VocabComparison compare_vocabs(const Tokenizer& a, const Tokenizer& b,
                               std::span<const std::string> terms,
                               std::span<const std::string> corpus, std::string name_a,
                               std::string name_b) {
  VocabComparison c;
  c.name_a = std::move(name_a);
  c.name_b = std::move(name_b);
  c.fragmentation_a = fragmentation_report(a, terms);
  c.fragmentation_b = fragmentation_report(b, terms);
  c.length_a = avg_length(a, corpus);
  c.length_b = avg_length(b, corpus);
  c.length_a.vocab_id = c.name_a;
  c.length_b.vocab_id = c.name_b;
  for (std::size_t i = 0; i < terms.size(); ++i) {
    c.piece_count_delta.push_back(static_cast<long>(c.fragmentation_b.terms[i].pieces.size()) -
                                  static_cast<long>(c.fragmentation_a.terms[i].pieces.size()));
  }
  return c;
}

ordered_json VocabComparison::to_json() const {
  ordered_json j;
  j["a"] = {{"name", name_a},
            {"fragmentation", fragmentation_a.to_json()},
            {"length", length_a.to_json()}};
  j["b"] = {{"name", name_b},
            {"fragmentation", fragmentation_b.to_json()},
            {"length", length_b.to_json()}};
  j["piece_count_delta"] = piece_count_delta;
  j["mean_piece_count_delta"] = fragmentation_b.mean_piece_count - fragmentation_a.mean_piece_count;
  j["whole_count_delta"] = static_cast<long>(fragmentation_b.whole_count) -
                           static_cast<long>(fragmentation_a.whole_count);
  j["mean_length_delta"] = mean_length_delta();
  return j;
}

std::string VocabComparison::to_text() const {
  std::size_t width = 4;
  for (const auto& t : fragmentation_a.terms) width = std::max(width, t.term.size());
  std::size_t col = std::max<std::size_t>(name_a.size(), 12);
  for (const auto& t : fragmentation_a.terms) col = std::max(col, join_pieces(t.pieces).size());
  std::ostringstream out;
  out << pad("term", width) << "  " << pad(name_a, col) << "  " << name_b << "\n";
  for (std::size_t i = 0; i < fragmentation_a.terms.size(); ++i) {
    const auto& ta = fragmentation_a.terms[i];
    const auto& tb = fragmentation_b.terms[i];
    out << pad(ta.term, width) << "  " << pad(ta.whole ? "whole" : join_pieces(ta.pieces), col)
        << "  " << (tb.whole ? "whole" : join_pieces(tb.pieces)) << "\n";
  }
  out << "whole terms: " << fragmentation_a.whole_count << " vs " << fragmentation_b.whole_count
      << "\n";
  out << "mean pieces per record: " << fixed(length_a.mean, 3) << " vs " << fixed(length_b.mean, 3)
      << " (delta " << fixed(mean_length_delta(), 3) << ", " << length_a.records << " records)\n";
  out << "unk terms: " << fixed(100.0 * fragmentation_a.unk_fraction, 1) << "% vs "
      << fixed(100.0 * fragmentation_b.unk_fraction, 1) << "%\n";
  return out.str();
}

}  // namespace blurbkit
