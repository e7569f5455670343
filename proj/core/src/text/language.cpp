#include "cuenet/text/language.hpp"

#include <algorithm>
#include <array>

#include "cuenet/text/tokenizer.hpp"
#include "cuenet/text/unicode.hpp"

namespace cuenet::text {
namespace {

constexpr std::array<std::string_view, 64> kStopwords{
    "a",    "about", "all",   "am",   "an",    "and",  "are",  "as",
    "at",   "be",    "been",  "but",  "by",    "can",  "do",   "for",
    "from", "get",   "had",   "has",  "have",  "he",   "her",  "him",
    "his",  "how",   "i",     "if",   "in",    "is",   "it",   "its",
    "just", "me",    "my",    "no",   "not",   "of",   "on",   "or",
    "our",  "out",   "she",   "so",   "that",  "the",  "their", "them",
    "then", "there", "they",  "this", "to",    "up",   "was",  "we",
    "what", "when",  "who",   "will", "with",  "you",  "your", "yes"};

bool is_stopword(std::string_view lower) {
  return std::find(kStopwords.begin(), kStopwords.end(), lower) != kStopwords.end();
}

bool is_latin_word(std::string_view surface) {
  const auto cps = decode_utf8(surface);
  bool any_letter = false;
  for (char32_t cp : cps) {
    if (is_latin_letter(cp)) {
      any_letter = true;
    } else if (!(cp == U'\'' || cp == 0x2019 || cp == U'-' || is_ascii_digit(cp))) {
      return false;
    }
  }
  return any_letter;
}

}  // namespace

double latin_word_fraction(std::string_view raw) {
  std::size_t words = 0;
  std::size_t latin = 0;
  for (const auto& t : tokenize(raw)) {
    if (t.kind != TokenKind::word) continue;
    ++words;
    if (is_stopword(ascii_lower(t.surface)) || is_latin_word(t.surface)) ++latin;
  }
  return words == 0 ? 0.0 : static_cast<double>(latin) / static_cast<double>(words);
}

bool is_english(std::string_view raw, double threshold) {
  const double fraction = latin_word_fraction(raw);
  return fraction > 0.0 && fraction >= threshold;
}

LanguagePredicate english_heuristic(double threshold) {
  return [threshold](std::string_view raw) { return is_english(raw, threshold); };
}

}  // namespace cuenet::text
