#pragma once

#include <functional>
#include <string_view>

namespace cuenet::text {

/// Any detector with this signature can stand in for the built-in one.
using LanguagePredicate = std::function<bool(std::string_view)>;

inline constexpr double kDefaultEnglishThreshold = 0.5;

/// Fraction of word tokens that are Latin-script words or English
/// stopwords. Hashtags, emoji, punctuation and placeholders do not count.
/// Returns 0 when the text has no word tokens.
double latin_word_fraction(std::string_view raw);

/// latin_word_fraction(raw) >= threshold, with at least one word token.
bool is_english(std::string_view raw, double threshold = kDefaultEnglishThreshold);

LanguagePredicate english_heuristic(double threshold = kDefaultEnglishThreshold);

}  // namespace cuenet::text
