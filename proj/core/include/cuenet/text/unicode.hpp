#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace cuenet::text {

/// Decodes UTF-8. Invalid bytes decode to U+FFFD one byte at a time, so every
/// input yields a sequence.
std::u32string decode_utf8(std::string_view bytes);

std::string encode_utf8(char32_t cp);
std::string encode_utf8(std::u32string_view cps);

/// Byte offset of every codepoint start plus a trailing entry equal to
/// bytes.size(); the same decoding rule as decode_utf8.
std::vector<std::size_t> utf8_offsets(std::string_view bytes);

bool is_space(char32_t cp);
bool is_ascii_alpha(char32_t cp);
bool is_ascii_digit(char32_t cp);
bool is_ascii_upper(char32_t cp);
bool is_emoji(char32_t cp);
/// Codepoints that never stand alone: variation selectors, skin tones, ZWJ
/// and combining keycap.
bool is_emoji_modifier(char32_t cp);
bool is_punctuation(char32_t cp);
/// Latin script letters: ASCII, Latin-1 supplement and Latin Extended A/B.
bool is_latin_letter(char32_t cp);
/// Letters, digits, underscore and any non-ASCII codepoint that is neither
/// space, punctuation nor emoji.
bool is_word_char(char32_t cp);

std::string ascii_lower(std::string_view s);

}  // namespace cuenet::text
