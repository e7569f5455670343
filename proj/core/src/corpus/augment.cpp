#include "cuenet/corpus/augment.hpp"

#include <algorithm>
#include <numeric>
#include <unordered_set>

#include "cuenet/error.hpp"
#include "cuenet/rng.hpp"
#include "cuenet/text/tokenizer.hpp"

namespace cuenet::corpus {
namespace {

bool overlaps(const Example& ex, const std::set<std::string>& tags) {
  for (const auto& tag : text::extract_hashtags(ex.tokens)) {
    if (tags.count(tag) > 0) return true;
  }
  return false;
}

// Keeps `n` of `items` chosen uniformly, preserving their relative order.
std::vector<const Example*> subsample(const std::vector<const Example*>& items,
                                      std::size_t n, Rng& rng) {
  if (n >= items.size()) return items;
  std::vector<std::size_t> order(items.size());
  std::iota(order.begin(), order.end(), 0);
  // Partial Fisher-Yates: the first n slots become a uniform n-subset.
  for (std::size_t i = 0; i < n; ++i) {
    std::swap(order[i], order[i + rng.index(order.size() - i)]);
  }
  order.resize(n);
  std::sort(order.begin(), order.end());
  std::vector<const Example*> out;
  out.reserve(n);
  for (std::size_t i : order) out.push_back(items[i]);
  return out;
}

}  // namespace

AugmentResult augment(const Dataset& target, const AugmentationPool& pool,
                      const text::LanguagePredicate& lang_filter, std::uint64_t seed) {
  if (pool.empty()) throw UsageError("augmentation pool is empty");

  AugmentResult result;
  result.dataset = target;
  for (Split s : kAllSplits) {
    for (const auto& ex : target.split(s)) {
      auto tags = text::extract_hashtags(ex.tokens);
      result.target_hashtags.insert(tags.begin(), tags.end());
    }
  }

  auto qualify = [&](const std::vector<Example>& side) {
    std::vector<const Example*> out;
    for (const auto& ex : side) {
      if (lang_filter && !lang_filter(ex.text)) {
        ++result.dropped_by_language;
        continue;
      }
      if (overlaps(ex, result.target_hashtags)) out.push_back(&ex);
    }
    return out;
  };
  const auto positives = qualify(pool.positive);
  const auto negatives = qualify(pool.negative);
  result.qualifying_positive = positives.size();
  result.qualifying_negative = negatives.size();

  if (positives.empty() && negatives.empty()) {
    result.status = AugmentStatus::empty_overlap;
    return result;
  }

  const std::size_t n = std::min(positives.size(), negatives.size());
  result.per_class = n;
  Rng rng(seed);
  const auto chosen_pos = subsample(positives, n, rng);
  const auto chosen_neg = subsample(negatives, n, rng);

  std::unordered_set<std::string> ids;
  for (Split s : kAllSplits) {
    for (const auto& ex : target.split(s)) ids.insert(ex.id);
  }
  auto append = [&](const Example* ex, Label label) {
    Example copy = *ex;
    copy.label = label;
    copy.source = Source::external;
    if (!ids.insert(copy.id).second) {
      throw DataError("augmentation id '" + copy.id + "' collides with an existing id");
    }
    result.dataset.train.push_back(std::move(copy));
  };
  for (const Example* ex : chosen_pos) append(ex, Label::positive);
  for (const Example* ex : chosen_neg) append(ex, Label::negative);
  return result;
}

}  // namespace cuenet::corpus
