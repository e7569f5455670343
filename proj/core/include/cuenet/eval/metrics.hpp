#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>

#include "cuenet/label.hpp"

namespace cuenet::eval {

enum class Averaging { positive_class, macro };

std::string_view to_string(Averaging averaging);
std::optional<Averaging> averaging_from_string(std::string_view s);

/// Counts with class 1 as the positive class.
struct Confusion {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  std::size_t tn = 0;
  std::size_t total() const { return tp + fp + fn + tn; }
  friend bool operator==(const Confusion&, const Confusion&) = default;
};

struct Metrics {
  double accuracy = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  Confusion confusion;
  Averaging averaging = Averaging::positive_class;
};

/// A ratio with a zero denominator counts as 0, as does F1 when precision
/// and recall are both 0. Macro mode averages the two per-class scores.
Metrics metrics_from_confusion(const Confusion& confusion, Averaging averaging);

/// Throws LengthMismatch on different lengths, UsageError when empty.
Metrics compute_metrics(std::span<const Label> predictions, std::span<const Label> labels,
                        Averaging averaging = Averaging::positive_class);

}  // namespace cuenet::eval
