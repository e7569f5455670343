#include "cuenet/corpus/filter.hpp"

#include "cuenet/error.hpp"

namespace cuenet::corpus {

FilterResult apply_tay_filter(const Dataset& d, std::size_t truncation_limit,
                              std::size_t min_tokens) {
  if (min_tokens == 0 || truncation_limit < min_tokens) {
    throw UsageError("tay filter needs truncation_limit >= min_tokens >= 1 (got " +
                     std::to_string(truncation_limit) + ", " + std::to_string(min_tokens) +
                     ")");
  }
  FilterResult result;
  result.dataset.name = d.name;
  result.dataset.truncation_limit = truncation_limit;
  result.dataset.min_tokens = min_tokens;
  for (Split s : kAllSplits) {
    const auto idx = static_cast<std::size_t>(s);
    auto& out = result.dataset.split(s);
    for (const auto& ex : d.split(s)) {
      if (ex.tokens.size() < min_tokens) {
        ++result.report.removed[idx];
        continue;
      }
      out.push_back(ex);
      if (ex.tokens.size() > truncation_limit) {
        out.back().tokens.resize(truncation_limit);
        ++result.report.truncated[idx];
      }
    }
  }
  return result;
}

}  // namespace cuenet::corpus
