#pragma once

#include <cstddef>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace cuenet::text {

enum class TokenKind {
  word,
  hashtag,
  mention_placeholder,
  url_placeholder,
  emoji,
  emoticon,
  punctuation,
  number,
  other,
};

std::string_view to_string(TokenKind kind);
std::optional<TokenKind> token_kind_from_string(std::string_view name);

inline constexpr std::string_view kUserPlaceholder = "<user>";
inline constexpr std::string_view kUrlPlaceholder = "<url>";

/// One token; `surface` holds the original characters (placeholders aside).
struct Token {
  std::string surface;
  TokenKind kind = TokenKind::word;

  friend bool operator==(const Token&, const Token&) = default;
};

using TokenSequence = std::vector<Token>;

struct TokenizerConfig {
  bool strip_artifact_hashtags = false;
  /// Compared case-insensitively; every entry starts with '#'.
  std::set<std::string> artifact_hashtags{"#sarcasm", "#irony", "#not"};
  /// Longer tokens are truncated to this many codepoints.
  std::size_t max_token_chars = 50;

  /// Throws UsageError when an artifact hashtag lacks the leading '#' or the
  /// length cap is zero.
  void validate() const;
};

}  // namespace cuenet::text
