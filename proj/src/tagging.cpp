#include "blurbkit/tagging.hpp"

#include <algorithm>
#include <optional>

#include "blurbkit/error.hpp"

namespace blurbkit {

std::string_view to_string(TagScheme scheme) {
  switch (scheme) {
    case TagScheme::kBIO: return "bio";
    case TagScheme::kBIOUL: return "bioul";
    case TagScheme::kIO: return "io";
  }
  return "?";
}

TagScheme parse_scheme(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "bio") return TagScheme::kBIO;
  if (lower == "bioul" || lower == "bilou") return TagScheme::kBIOUL;
  if (lower == "io") return TagScheme::kIO;
  throw ConfigError("unknown tagging scheme '" + std::string(name) + "' (expected bio|bioul|io)");
}

namespace {

struct ParsedTag {
  char prefix = 'O';  // 'O', 'B', 'I', 'L', 'U' (canonical letters)
  std::string type;
};

char last_letter(const TagOptions& o) { return o.swapped_bioul_letters ? 'U' : 'L'; }
char unit_letter(const TagOptions& o) { return o.swapped_bioul_letters ? 'L' : 'U'; }

ParsedTag parse_tag(std::string_view tag, std::size_t index, TagScheme scheme,
                    const TagOptions& options) {
  if (tag == "O") return {};
  if (tag.size() < 3 || tag[1] != '-') {
    throw DataError("malformed tag '" + std::string(tag) + "' at index " + std::to_string(index));
  }
  ParsedTag p{tag[0], std::string(tag.substr(2))};
  const auto allowed = [&] {
    switch (scheme) {
      case TagScheme::kBIO: return std::string_view("BI");
      case TagScheme::kBIOUL: return std::string_view("BILU");
      case TagScheme::kIO: return std::string_view("I");
    }
    return std::string_view();
  }();
  if (allowed.find(p.prefix) == std::string_view::npos) {
    throw DataError("tag '" + std::string(tag) + "' at index " + std::to_string(index) +
                    " is not valid under " + std::string(to_string(scheme)));
  }
  if (scheme == TagScheme::kBIOUL) {
    // Map the file's letters onto canonical L = last, U = unit.
    if (p.prefix == last_letter(options)) {
      p.prefix = 'L';
    } else if (p.prefix == unit_letter(options)) {
      p.prefix = 'U';
    }
  }
  return p;
}

std::string make_tag(char prefix, const std::string& type) {
  std::string t(1, prefix);
  t.push_back('-');
  t.append(type);
  return t;
}

}  // namespace

TagSequence spans_to_tags(std::vector<EntitySpan> spans, std::size_t n_words, TagScheme scheme,
                          const TagOptions& options) {
  std::sort(spans.begin(), spans.end());
  for (std::size_t i = 0; i < spans.size(); ++i) {
    const auto& s = spans[i];
    if (s.start > s.end || s.end >= n_words) {
      throw DataError("span (" + std::to_string(s.start) + ", " + std::to_string(s.end) +
                      ") out of range for " + std::to_string(n_words) + " words");
    }
    if (s.type.empty()) throw DataError("span has an empty entity type");
    if (i > 0 && spans[i - 1].end >= s.start) {
      const auto& p = spans[i - 1];
      throw DataError("overlapping spans (" + std::to_string(p.start) + ", " +
                      std::to_string(p.end) + ", " + p.type + ") and (" + std::to_string(s.start) +
                      ", " + std::to_string(s.end) + ", " + s.type + ")");
    }
  }
  TagSequence out{scheme, std::vector<std::string>(n_words, "O")};
  for (const auto& s : spans) {
    for (std::size_t w = s.start; w <= s.end; ++w) {
      char prefix = 'I';
      if (scheme == TagScheme::kBIO) {
        prefix = w == s.start ? 'B' : 'I';
      } else if (scheme == TagScheme::kBIOUL) {
        if (s.start == s.end) {
          prefix = unit_letter(options);
        } else if (w == s.start) {
          prefix = 'B';
        } else if (w == s.end) {
          prefix = last_letter(options);
        }
      }
      out.tags[w] = make_tag(prefix, s.type);
    }
  }
  return out;
}

std::vector<EntitySpan> tags_to_spans(const TagSequence& seq, RepairMode mode,
                                      const TagOptions& options) {
  const bool strict = mode == RepairMode::kStrict;
  std::vector<EntitySpan> spans;
  std::optional<EntitySpan> open;
  const auto close = [&] {
    if (open) spans.push_back(*open);
    open.reset();
  };
  const auto violation = [&](std::size_t i, const std::string& why) {
    throw DataError("invalid " + std::string(to_string(seq.scheme)) + " sequence at index " +
                    std::to_string(i) + ": " + why);
  };

  for (std::size_t i = 0; i < seq.tags.size(); ++i) {
    // CoNLL mode tolerates any prefix regardless of scheme.
    const ParsedTag t = parse_tag(seq.tags[i], i, strict ? seq.scheme : TagScheme::kBIOUL, options);
    const bool continues = open && open->type == t.type;
    switch (t.prefix) {
      case 'O':
        if (strict && seq.scheme == TagScheme::kBIOUL && open) violation(i, "entity not closed by L");
        close();
        break;
      case 'B':
        if (strict && seq.scheme == TagScheme::kBIOUL && open) violation(i, "entity not closed by L");
        close();
        open = EntitySpan{i, i, t.type};
        break;
      case 'I':
        if (continues) {
          open->end = i;
        } else {
          if (strict && seq.scheme != TagScheme::kIO) {
            violation(i, "'" + seq.tags[i] + "' does not continue an open entity of that type");
          }
          close();
          open = EntitySpan{i, i, t.type};
        }
        break;
      case 'L':
        if (continues) {
          open->end = i;
          close();
        } else {
          if (strict) violation(i, "'" + seq.tags[i] + "' does not close an open entity of that type");
          close();
          spans.push_back(EntitySpan{i, i, t.type});
        }
        break;
      case 'U':
        if (strict && open && seq.scheme == TagScheme::kBIOUL) violation(i, "entity not closed by L");
        close();
        spans.push_back(EntitySpan{i, i, t.type});
        break;
      default:
        violation(i, "unknown prefix");
    }
    if (strict && seq.scheme == TagScheme::kBIOUL && open && t.prefix == 'I' &&
        i + 1 == seq.tags.size()) {
      violation(i, "entity not closed by L");
    }
  }
  if (strict && seq.scheme == TagScheme::kBIOUL && open) {
    violation(seq.tags.size() - 1, "entity not closed by L");
  }
  close();
  return spans;
}

SchemeConversion convert_scheme(const TagSequence& tags, TagScheme to, const TagOptions& options) {
  std::vector<EntitySpan> spans = tags_to_spans(tags, RepairMode::kStrict, options);
  bool merged = false;
  if (to == TagScheme::kIO) {
    std::vector<EntitySpan> joined;
    for (auto& s : spans) {
      if (!joined.empty() && joined.back().end + 1 == s.start && joined.back().type == s.type) {
        joined.back().end = s.end;
        merged = true;
      } else {
        joined.push_back(std::move(s));
      }
    }
    spans = std::move(joined);
  }
  return SchemeConversion{spans_to_tags(std::move(spans), tags.tags.size(), to, options), merged};
}

std::vector<std::string> tag_set(TagScheme scheme, std::vector<std::string> types) {
  std::sort(types.begin(), types.end());
  types.erase(std::unique(types.begin(), types.end()), types.end());
  std::vector<std::string> out{"O"};
  const std::string_view letters = scheme == TagScheme::kBIO     ? "BI"
                                   : scheme == TagScheme::kBIOUL ? "BILU"
                                                                 : "I";
  for (const auto& t : types) {
    for (char p : letters) out.push_back(make_tag(p, t));
  }
  return out;
}

TagScheme infer_scheme(std::span<const std::string> tags) {
  bool has_b = false;
  for (const auto& t : tags) {
    if (t.starts_with("L-") || t.starts_with("U-")) return TagScheme::kBIOUL;
    has_b |= t.starts_with("B-");
  }
  return has_b ? TagScheme::kBIO : TagScheme::kIO;
}

}  // namespace blurbkit
