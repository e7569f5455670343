#pragma once

#include <array>
#include <cstddef>

#include "cuenet/corpus/dataset.hpp"

namespace cuenet::corpus {

struct FilterReport {
  /// Indexed by Split.
  std::array<std::size_t, 3> removed{};
  std::array<std::size_t, 3> truncated{};

  std::size_t total_removed() const { return removed[0] + removed[1] + removed[2]; }
  std::size_t total_truncated() const { return truncated[0] + truncated[1] + truncated[2]; }
};

struct FilterResult {
  Dataset dataset;
  FilterReport report;
};

/// Baseline-compatible length filter: keeps the first `truncation_limit`
/// tokens of longer examples and removes examples shorter than
/// `min_tokens`, in every split. Requires truncation_limit >= min_tokens >= 1.
FilterResult apply_tay_filter(const Dataset& d, std::size_t truncation_limit,
                              std::size_t min_tokens = 5);

}  // namespace cuenet::corpus
