#pragma once

#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cuenet/text/token.hpp"

namespace cuenet::text {

/// Cue-preserving tweet tokenizer.
///
/// Scans codepoints left to right; at each non-space position the first
/// matching rule wins:
///
///   1. the literals "<user>" / "<url>"            -> placeholder tokens
///   2. URL: `[A-Za-z][A-Za-z0-9+.-]*://` or `www.` (case-insensitive) at a
///      word boundary, running to the next space, emoji, `"`, `<` or `>`,
///      with trailing `.,;:!?'")]}` given back                -> "<url>"
///   3. mention: `@[A-Za-z0-9_]+` at a word boundary           -> "<user>"
///   4. hashtag: `#` + word characters at a word boundary
///   5. emoji: one pictographic codepoint plus trailing variation selectors,
///      skin tones and ZWJ-joined pictographs; regional-indicator pairs
///   6. emoticon from the fixed inventory (emoticons() below), at a word
///      boundary; letter-final ones also need a non-word character after
///   7. word / number: word characters, joined across single internal
///      apostrophes or hyphens, and `.`/`,`/`:` between digits; all-digit
///      runs are numbers
///   8. punctuation: a run of one repeated character, or any mix of `!`/`?`
///   9. anything else: a single-codepoint `other` token
///
/// Case, repeated letters and punctuation are never altered. A word boundary
/// means the previous codepoint is not a word character.
TokenSequence tokenize(std::string_view raw, const TokenizerConfig& cfg = {});

/// Lowercased hashtag surfaces (with '#'), deduplicated.
std::set<std::string> extract_hashtags(std::span<const Token> tokens);

/// Joins surfaces with single spaces.
std::string detokenize(std::span<const Token> tokens);

/// Emoticon inventory, longest first.
const std::vector<std::string>& emoticons();

}  // namespace cuenet::text
