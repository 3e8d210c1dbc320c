#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

// Small UTF-8 helpers. Offsets exposed by the generator are code points.
namespace techdoc::text {

std::size_t code_point_count(std::string_view s);

// Decodes into code points; invalid bytes are passed through as U+FFFD.
std::vector<char32_t> decode(std::string_view s);
std::string encode(char32_t cp);

// Uppercases the first code point (ASCII plus the Latin-1 letters used by
// the German and French lexicons).
std::string capitalize_first(std::string_view s);

// True if the word starts with a vowel or mute h, for French elision and
// English a/an selection.
bool starts_with_vowel_sound(std::string_view word, bool treat_h_as_vowel);

// Substring by code point range [begin, end).
std::string substr_cp(std::string_view s, std::size_t begin, std::size_t end);

// 64-bit FNV-1a, rendered as 16 lowercase hex digits.
std::string fnv1a_hex(std::string_view data);

std::vector<std::string> split(std::string_view s, char sep);

}  // namespace techdoc::text
