#include "cuenet/text/tokenizer.hpp"

#include <algorithm>
#include <array>

#include "cuenet/error.hpp"
#include "cuenet/text/unicode.hpp"

namespace cuenet::text {

namespace {

constexpr std::array<std::pair<TokenKind, std::string_view>, 9> kKindNames{{
    {TokenKind::word, "word"},
    {TokenKind::hashtag, "hashtag"},
    {TokenKind::mention_placeholder, "mention_placeholder"},
    {TokenKind::url_placeholder, "url_placeholder"},
    {TokenKind::emoji, "emoji"},
    {TokenKind::emoticon, "emoticon"},
    {TokenKind::punctuation, "punctuation"},
    {TokenKind::number, "number"},
    {TokenKind::other, "other"},
}};

bool is_regional_indicator(char32_t cp) { return cp >= 0x1F1E6 && cp <= 0x1F1FF; }

bool is_apostrophe(char32_t cp) { return cp == U'\'' || cp == 0x2019; }

bool is_url_stop(char32_t cp) {
  return is_space(cp) || is_emoji(cp) || cp == U'"' || cp == U'<' || cp == U'>';
}

bool is_url_trailer(char32_t cp) {
  switch (cp) {
    case U'.': case U',': case U';': case U':': case U'!': case U'?':
    case U'\'': case U'"': case U')': case U']': case U'}':
      return true;
    default:
      return false;
  }
}

char32_t ascii_fold(char32_t cp) {
  return (cp >= U'A' && cp <= U'Z') ? cp - U'A' + U'a' : cp;
}

class Scanner {
 public:
  Scanner(std::string_view raw, const TokenizerConfig& cfg)
      : raw_(raw), cfg_(cfg), cps_(decode_utf8(raw)), offsets_(utf8_offsets(raw)) {}

  TokenSequence run() {
    std::size_t i = 0;
    while (i < cps_.size()) {
      if (is_space(cps_[i])) {
        ++i;
        continue;
      }
      i = next_token(i);
    }
    return std::move(out_);
  }

 private:
  std::size_t next_token(std::size_t i) {
    if (std::size_t n = match_literal(i, kUserPlaceholder)) {
      emit_placeholder(TokenKind::mention_placeholder);
      return i + n;
    }
    if (std::size_t n = match_literal(i, kUrlPlaceholder)) {
      emit_placeholder(TokenKind::url_placeholder);
      return i + n;
    }
    const bool boundary = i == 0 || !is_word_char(cps_[i - 1]);
    if (boundary) {
      if (std::size_t end = match_url(i); end > i) {
        emit_placeholder(TokenKind::url_placeholder);
        return end;
      }
      if (cps_[i] == U'@' && i + 1 < cps_.size() && is_handle_char(cps_[i + 1])) {
        std::size_t end = i + 1;
        while (end < cps_.size() && is_handle_char(cps_[end])) ++end;
        emit_placeholder(TokenKind::mention_placeholder);
        return end;
      }
      if (cps_[i] == U'#' && i + 1 < cps_.size() && is_word_char(cps_[i + 1])) {
        std::size_t end = i + 1;
        while (end < cps_.size() && is_word_char(cps_[end])) ++end;
        emit(i, end, TokenKind::hashtag);
        return end;
      }
    }
    if (is_emoji(cps_[i])) {
      std::size_t end = scan_emoji(i);
      emit(i, end, TokenKind::emoji);
      return end;
    }
    if (boundary) {
      if (std::size_t n = match_emoticon(i)) {
        emit(i, i + n, TokenKind::emoticon);
        return i + n;
      }
    }
    if (is_word_char(cps_[i])) {
      return scan_word(i);
    }
    if (is_punctuation(cps_[i])) {
      std::size_t end = i + 1;
      if (is_bang(cps_[i])) {
        while (end < cps_.size() && is_bang(cps_[end])) ++end;
      } else {
        while (end < cps_.size() && cps_[end] == cps_[i]) ++end;
      }
      emit(i, end, TokenKind::punctuation);
      return end;
    }
    emit(i, i + 1, TokenKind::other);
    return i + 1;
  }

  static bool is_handle_char(char32_t cp) {
    return is_ascii_alpha(cp) || is_ascii_digit(cp) || cp == U'_';
  }

  static bool is_bang(char32_t cp) { return cp == U'!' || cp == U'?'; }

  std::size_t match_literal(std::size_t i, std::string_view lit) const {
    if (i + lit.size() > cps_.size()) return 0;
    for (std::size_t k = 0; k < lit.size(); ++k) {
      if (cps_[i + k] != static_cast<char32_t>(lit[k])) return 0;
    }
    return lit.size();
  }

  bool match_literal_ci(std::size_t i, std::string_view lit) const {
    if (i + lit.size() > cps_.size()) return false;
    for (std::size_t k = 0; k < lit.size(); ++k) {
      if (ascii_fold(cps_[i + k]) != static_cast<char32_t>(lit[k])) return false;
    }
    return true;
  }

  // Returns the end of the URL, or i when there is none.
  std::size_t match_url(std::size_t i) const {
    std::size_t body = i;
    if (match_literal_ci(i, "www.")) {
      body = i + 4;
    } else if (is_ascii_alpha(cps_[i])) {
      std::size_t k = i + 1;
      while (k < cps_.size() && (is_ascii_alpha(cps_[k]) || is_ascii_digit(cps_[k]) ||
                                 cps_[k] == U'+' || cps_[k] == U'.' || cps_[k] == U'-')) {
        ++k;
      }
      if (!match_literal(k, "://")) return i;
      body = k + 3;
    } else {
      return i;
    }
    std::size_t end = body;
    while (end < cps_.size() && !is_url_stop(cps_[end])) ++end;
    while (end > body && is_url_trailer(cps_[end - 1])) --end;
    return end > body ? end : i;
  }

  std::size_t scan_emoji(std::size_t i) const {
    std::size_t end = i + 1;
    if (is_regional_indicator(cps_[i]) && end < cps_.size() &&
        is_regional_indicator(cps_[end])) {
      return end + 1;
    }
    while (end < cps_.size()) {
      if (cps_[end] == 0x200D && end + 1 < cps_.size() && is_emoji(cps_[end + 1])) {
        end += 2;
      } else if (is_emoji_modifier(cps_[end]) && cps_[end] != 0x200D) {
        ++end;
      } else {
        break;
      }
    }
    return end;
  }

  std::size_t match_emoticon(std::size_t i) const {
    for (const auto& e : emoticons()) {
      if (!match_literal(i, e)) continue;
      const std::size_t end = i + e.size();
      const char32_t last = static_cast<char32_t>(e.back());
      const bool alnum_final = is_ascii_alpha(last) || is_ascii_digit(last);
      if (alnum_final && end < cps_.size() && is_word_char(cps_[end])) continue;
      return e.size();
    }
    return 0;
  }

  std::size_t scan_word(std::size_t i) {
    std::size_t end = i + 1;
    while (end < cps_.size()) {
      const char32_t cp = cps_[end];
      if (is_word_char(cp)) {
        ++end;
        continue;
      }
      const bool has_next = end + 1 < cps_.size();
      if (has_next && (is_apostrophe(cp) || cp == U'-') && is_word_char(cps_[end + 1])) {
        end += 2;
        continue;
      }
      if (has_next && (cp == U'.' || cp == U',' || cp == U':') &&
          is_ascii_digit(cps_[end - 1]) && is_ascii_digit(cps_[end + 1])) {
        end += 2;
        continue;
      }
      break;
    }
    const bool numeric = std::all_of(cps_.begin() + i, cps_.begin() + end, [](char32_t cp) {
      return is_ascii_digit(cp) || cp == U'.' || cp == U',' || cp == U':';
    });
    emit(i, end, numeric ? TokenKind::number : TokenKind::word);
    return end;
  }

  void emit(std::size_t begin, std::size_t end, TokenKind kind) {
    end = std::min(end, begin + cfg_.max_token_chars);
    std::string surface(raw_.substr(offsets_[begin], offsets_[end] - offsets_[begin]));
    if (kind == TokenKind::hashtag && cfg_.strip_artifact_hashtags &&
        cfg_.artifact_hashtags.count(ascii_lower(surface)) > 0) {
      return;
    }
    out_.push_back(Token{std::move(surface), kind});
  }

  void emit_placeholder(TokenKind kind) {
    out_.push_back(Token{std::string(kind == TokenKind::mention_placeholder
                                         ? kUserPlaceholder
                                         : kUrlPlaceholder),
                         kind});
  }

  std::string_view raw_;
  const TokenizerConfig& cfg_;
  std::u32string cps_;
  std::vector<std::size_t> offsets_;
  TokenSequence out_;
};

}  // namespace

std::string_view to_string(TokenKind kind) {
  for (const auto& [k, name] : kKindNames) {
    if (k == kind) return name;
  }
  return "other";
}

std::optional<TokenKind> token_kind_from_string(std::string_view name) {
  for (const auto& [k, n] : kKindNames) {
    if (n == name) return k;
  }
  return std::nullopt;
}

void TokenizerConfig::validate() const {
  if (max_token_chars == 0) throw UsageError("max_token_chars must be positive");
  for (const auto& tag : artifact_hashtags) {
    if (tag.empty() || tag.front() != '#') {
      throw UsageError("artifact hashtag '" + tag + "' must begin with '#'");
    }
  }
}

const std::vector<std::string>& emoticons() {
  static const std::vector<std::string> list = [] {
    std::vector<std::string> v{
        ">:(", ">:)", ":-)", ":-(", ":-D", ":-P", ":-p", ":-/", ":-|", ":-O",
        ":-o", ":-*", ";-)", ";-(", ":'(", ":')", "^_^", "-_-", "</3", "^^",
        ":)",  ":(",  ":D",  ":P",  ":p",  ":/",  ":|",  ":O",  ":o",  ":*",
        ";)",  ";(",  ";D",  ";P",  ";p",  "=)",  "=(",  "=D",  ":]",  ":[",
        ":3",  "<3",  ":S",  ":$"};
    std::stable_sort(v.begin(), v.end(), [](const std::string& a, const std::string& b) {
      return a.size() > b.size();
    });
    return v;
  }();
  return list;
}

TokenSequence tokenize(std::string_view raw, const TokenizerConfig& cfg) {
  return Scanner(raw, cfg).run();
}

std::set<std::string> extract_hashtags(std::span<const Token> tokens) {
  std::set<std::string> out;
  for (const auto& t : tokens) {
    if (t.kind == TokenKind::hashtag) out.insert(ascii_lower(t.surface));
  }
  return out;
}

std::string detokenize(std::span<const Token> tokens) {
  std::string out;
  for (const auto& t : tokens) {
    if (!out.empty()) out.push_back(' ');
    out += t.surface;
  }
  return out;
}

}  // namespace cuenet::text
