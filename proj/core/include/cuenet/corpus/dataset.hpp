#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cuenet/label.hpp"
#include "cuenet/text/token.hpp"

namespace cuenet::corpus {

enum class Source { twitter, reddit, dialog, external };

std::string_view to_string(Source s);
std::optional<Source> source_from_string(std::string_view s);

struct Example {
  std::string id;
  std::string text;  // raw input line, kept for language filtering and output
  text::TokenSequence tokens;
  Label label = Label::negative;
  Source source = Source::twitter;
};

enum class Split { train, valid, test };
inline constexpr std::array<Split, 3> kAllSplits{Split::train, Split::valid, Split::test};

std::string_view to_string(Split s);
/// Accepts "train", "valid", "dev" and "test".
std::optional<Split> split_from_string(std::string_view s);

struct Dataset {
  std::string name;
  std::vector<Example> train;
  std::vector<Example> valid;
  std::vector<Example> test;
  std::optional<std::size_t> truncation_limit;
  std::optional<std::size_t> min_tokens;

  std::vector<Example>& split(Split s);
  const std::vector<Example>& split(Split s) const;
  std::size_t size() const { return train.size() + valid.size() + test.size(); }

  /// Checks disjoint ids, non-empty token sequences and the length bounds;
  /// throws DataError on the first violation.
  void validate() const;
};

enum class Side { a, b };

struct SarcPair {
  std::string context_id;
  Example statement_a;
  Example statement_b;
  Side sarcastic_index = Side::a;

  const Example& sarcastic() const {
    return sarcastic_index == Side::a ? statement_a : statement_b;
  }
};

/// Soft-labeled external examples; every entry has source == external.
struct AugmentationPool {
  std::vector<Example> positive;
  std::vector<Example> negative;

  bool empty() const { return positive.empty() && negative.empty(); }
};

}  // namespace cuenet::corpus
