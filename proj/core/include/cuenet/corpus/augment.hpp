#pragma once

#include <cstddef>
#include <cstdint>
#include <set>
#include <string>

#include "cuenet/corpus/dataset.hpp"
#include "cuenet/text/language.hpp"

namespace cuenet::corpus {

enum class AugmentStatus { ok, empty_overlap };

struct AugmentResult {
  Dataset dataset;
  AugmentStatus status = AugmentStatus::ok;
  /// Examples added per class; 0 on empty_overlap.
  std::size_t per_class = 0;
  std::size_t dropped_by_language = 0;
  std::size_t qualifying_positive = 0;
  std::size_t qualifying_negative = 0;
  std::set<std::string> target_hashtags;
};

/// Hashtag-overlap augmentation of the training split.
///
/// Pool items failing `lang_filter` are dropped; the rest qualify when they
/// share at least one (case-insensitive) hashtag with any split of the
/// target. N = min(qualifying positives, qualifying negatives) items of each
/// class are appended to train, subsampling the larger side uniformly with
/// `seed`; selected items keep their pool order, positives first. No
/// overlap leaves the dataset unchanged with status empty_overlap.
/// Throws UsageError when the pool is empty.
AugmentResult augment(const Dataset& target, const AugmentationPool& pool,
                      const text::LanguagePredicate& lang_filter, std::uint64_t seed);

/// Full-scale per-class augmentation counts for the Ptacek, Riloff and
/// SemEval-2018 corpora. Reference values only; desk-scale pools do not
/// reproduce them.
struct ReferenceAugmentationCounts {
  static constexpr std::size_t ptacek = 36835;
  static constexpr std::size_t riloff = 8095;
  static constexpr std::size_t semeval2018 = 26168;
};

}  // namespace cuenet::corpus
