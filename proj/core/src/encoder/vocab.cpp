#include "cuenet/encoder/vocab.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "cuenet/error.hpp"
#include "cuenet/text/unicode.hpp"

namespace cuenet::encoder {

CharVocab::CharVocab() {
  std::vector<char32_t> ascii;
  for (char32_t cp = 0x20; cp < 0x7F; ++cp) ascii.push_back(cp);
  assign(std::move(ascii));
}

CharVocab CharVocab::from_codepoints(std::vector<char32_t> codepoints) {
  CharVocab v;
  v.assign(std::move(codepoints));
  return v;
}

void CharVocab::assign(std::vector<char32_t> codepoints) {
  codepoints_.clear();
  index_.clear();
  for (char32_t cp : codepoints) {
    if (index_.count(cp) > 0) throw DataError("duplicate codepoint in char vocabulary");
    index_.emplace(cp, kReserved + codepoints_.size());
    codepoints_.push_back(cp);
  }
}

CharVocab CharVocab::build(std::span<const text::TokenSequence> corpus) {
  std::set<char32_t> seen;
  for (char32_t cp = 0x20; cp < 0x7F; ++cp) seen.insert(cp);
  for (const auto& sentence : corpus) {
    for (const auto& tok : sentence) {
      for (char32_t cp : text::decode_utf8(tok.surface)) seen.insert(cp);
    }
  }
  return from_codepoints(std::vector<char32_t>(seen.begin(), seen.end()));
}

std::size_t CharVocab::index(char32_t cp) const {
  auto it = index_.find(cp);
  return it == index_.end() ? kUnknown : it->second;
}

std::vector<std::size_t> CharVocab::encode(std::string_view word, std::size_t max_chars) const {
  const auto cps = text::decode_utf8(word);
  const std::size_t n = std::min(cps.size(), max_chars);
  std::vector<std::size_t> ids;
  ids.reserve(n + 2);
  ids.push_back(kBeginWord);
  for (std::size_t i = 0; i < n; ++i) ids.push_back(index(cps[i]));
  ids.push_back(kEndWord);
  return ids;
}

WordVocab::WordVocab() : words_{std::string(kUnknownToken)} {
  index_.emplace(words_[0], 0);
}

WordVocab WordVocab::from_words(std::vector<std::string> words) {
  if (words.empty() || words[0] != kUnknownToken) {
    throw DataError("word vocabulary must start with <unk>");
  }
  WordVocab v;
  v.words_ = std::move(words);
  v.index_.clear();
  for (std::size_t i = 0; i < v.words_.size(); ++i) {
    if (!v.index_.emplace(v.words_[i], i).second) {
      throw DataError("duplicate word '" + v.words_[i] + "' in vocabulary");
    }
  }
  return v;
}

WordVocab WordVocab::build(std::span<const text::TokenSequence> corpus, std::size_t max_size) {
  std::map<std::string, std::size_t> counts;
  for (const auto& sentence : corpus) {
    for (const auto& tok : sentence) {
      if (tok.surface != kUnknownToken) ++counts[tok.surface];
    }
  }
  std::vector<std::pair<std::string, std::size_t>> sorted(counts.begin(), counts.end());
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  if (sorted.size() > max_size) sorted.resize(max_size);
  std::vector<std::string> words{std::string(kUnknownToken)};
  for (auto& [w, c] : sorted) words.push_back(std::move(w));
  return from_words(std::move(words));
}

std::size_t WordVocab::index(std::string_view word) const {
  auto it = index_.find(std::string(word));
  return it == index_.end() ? kUnknown : it->second;
}

}  // namespace cuenet::encoder
