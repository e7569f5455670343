#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "cuenet/text/token.hpp"

namespace cuenet::encoder {

/// Codepoint vocabulary for the character CNN. Indices 0-3 are reserved;
/// printable ASCII is always present so case and punctuation never fall into
/// the unknown bucket.
class CharVocab {
 public:
  static constexpr std::size_t kPad = 0;
  static constexpr std::size_t kBeginWord = 1;
  static constexpr std::size_t kEndWord = 2;
  static constexpr std::size_t kUnknown = 3;
  static constexpr std::size_t kReserved = 4;

  CharVocab();

  /// ASCII plus every other codepoint seen in `corpus`, in codepoint order.
  static CharVocab build(std::span<const text::TokenSequence> corpus);
  static CharVocab from_codepoints(std::vector<char32_t> codepoints);

  std::size_t index(char32_t cp) const;
  std::size_t size() const { return kReserved + codepoints_.size(); }
  /// Non-reserved codepoints; codepoint k has index kReserved + k.
  const std::vector<char32_t>& codepoints() const { return codepoints_; }

  /// [begin-of-word, chars..., end-of-word], keeping at most `max_chars`
  /// codepoints of the word.
  std::vector<std::size_t> encode(std::string_view word, std::size_t max_chars) const;

 private:
  void assign(std::vector<char32_t> codepoints);

  std::vector<char32_t> codepoints_;
  std::unordered_map<char32_t, std::size_t> index_;
};

/// Output vocabulary of the language model; index 0 is "<unk>".
class WordVocab {
 public:
  static constexpr std::size_t kUnknown = 0;
  static constexpr std::string_view kUnknownToken = "<unk>";

  WordVocab();

  /// The `max_size` most frequent surfaces (ties broken by byte order) plus
  /// the unknown entry.
  static WordVocab build(std::span<const text::TokenSequence> corpus, std::size_t max_size);
  /// `words[0]` must be "<unk>".
  static WordVocab from_words(std::vector<std::string> words);

  std::size_t index(std::string_view word) const;
  std::size_t size() const { return words_.size(); }
  const std::vector<std::string>& words() const { return words_; }

 private:
  std::vector<std::string> words_;
  std::unordered_map<std::string, std::size_t> index_;
};

}  // namespace cuenet::encoder
