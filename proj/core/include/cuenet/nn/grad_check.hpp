#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>

#include "cuenet/nn/param_store.hpp"

namespace cuenet::nn {

/// Evaluates a scalar loss from the store's current values. When
/// `with_grad` is true it must also accumulate d(loss)/d(value) into the
/// store's gradient slots. Must be deterministic (dropout off).
using LossFunction = std::function<double(ParamStore& store, bool with_grad)>;

struct GradCheckOptions {
  double step = 1e-5;
  /// Coordinates sampled across trainable entries; all when fewer exist.
  std::size_t coordinates = 200;
  std::uint64_t seed = 0;
  /// A coordinate is skipped as non-differentiable when its one-sided
  /// slopes differ by more than this (relative to max(1, |slope|)), e.g. a
  /// ReLU input or max-pool winner crossing within one step. Coordinates
  /// whose slopes differ by more than half the larger one are skipped too.
  double kink_tolerance = 1e-3;
  /// Lower bound on the relative-error denominator. Round-off in the
  /// central difference is about 1e-16 * |loss| / step, so gradients much
  /// below this floor cannot be resolved anyway.
  double denominator_floor = 1e-7;
};

struct GradCheckResult {
  /// max |a - n| / max(|a|, |n|, denominator_floor) over checked coordinates.
  double max_relative_error = 0.0;
  std::size_t checked = 0;
  std::size_t skipped = 0;
  std::string worst_parameter;
  std::size_t worst_index = 0;
  double worst_analytic = 0.0;
  double worst_numeric = 0.0;
};

/// Compares analytic gradients with central finite differences. Values are
/// restored and gradients zeroed on return.
GradCheckResult grad_check(const LossFunction& loss, ParamStore& store,
                           const GradCheckOptions& options = {});

}  // namespace cuenet::nn
