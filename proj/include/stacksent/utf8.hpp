#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace stacksent::utf8 {

// Decodes UTF-8 into code points. Malformed bytes decode to U+FFFD.
std::u32string decode(std::string_view text);
std::string encode(std::u32string_view code_points);
void append(std::string& out, char32_t cp);

// Simple (one-to-one) lowercase mapping for Latin, Greek, Cyrillic and
// Armenian blocks; other code points are returned unchanged.
char32_t to_lower(char32_t cp);

// Letter or decimal digit. Covers ASCII, Latin-1, Latin Extended A/B,
// IPA, Greek, Cyrillic, Armenian, Hebrew, Arabic, Devanagari, Latin
// Extended Additional, CJK, Hiragana, Katakana and Hangul.
bool is_alnum(char32_t cp);

bool is_space(char32_t cp);

std::string lowercase(std::string_view text);

} // namespace stacksent::utf8
