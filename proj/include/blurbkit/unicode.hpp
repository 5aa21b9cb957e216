#pragma once

// Thin UTF-8 / Unicode-property layer over ICU.

#include <cstddef>
#include <string>
#include <string_view>

namespace blurbkit::unicode {

inline constexpr char32_t kReplacement = 0xFFFD;

// Decodes the code point starting at `pos` and advances `pos`. Malformed
// sequences decode to U+FFFD and consume one byte.
char32_t next_code_point(std::string_view s, std::size_t& pos);

void append_utf8(std::string& out, char32_t cp);

bool is_valid_utf8(std::string_view s);
std::size_t code_point_count(std::string_view s);

std::string to_nfc(std::string_view s);
std::string to_nfd(std::string_view s);

// Full Unicode lowercase mapping (root locale, context-sensitive final sigma).
std::string to_lower(std::string_view s);

bool is_whitespace(char32_t cp);
// Any C* category (control, format, private use, unassigned) except tab,
// newline and carriage return.
bool is_control(char32_t cp);
// ASCII non-alphanumeric printable characters plus every Unicode P* category.
bool is_punctuation(char32_t cp);
bool is_cjk(char32_t cp);
bool is_nonspacing_mark(char32_t cp);
bool is_upper(char32_t cp);
bool is_digit(char32_t cp);

}  // namespace blurbkit::unicode
