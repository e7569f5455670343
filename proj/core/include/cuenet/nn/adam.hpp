#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>

#include "cuenet/nn/param_store.hpp"

namespace cuenet::nn {

/// Bias-corrected Adam. Moments are created lazily, one pair per trainable
/// parameter.
class AdamState {
 public:
  static constexpr double kBeta1 = 0.9;
  static constexpr double kBeta2 = 0.999;
  static constexpr double kEpsilon = 1e-8;

  explicit AdamState(double learning_rate = 1e-3);

  double learning_rate() const { return learning_rate_; }
  void set_learning_rate(double lr);
  std::uint64_t step() const { return step_; }

  struct Moments {
    Tensor m;
    Tensor v;
  };
  const std::unordered_map<std::string, Moments>& moments() const { return moments_; }

 private:
  friend void adam_step(ParamStore& store, AdamState& state);

  double learning_rate_;
  std::uint64_t step_ = 0;
  std::unordered_map<std::string, Moments> moments_;
};

/// One update of every trainable entry from its gradient; frozen entries are
/// untouched. All gradients are zeroed afterwards and the step count
/// advances by one. Throws NonFiniteGradient, before changing anything, if a
/// trainable gradient holds NaN or infinity.
void adam_step(ParamStore& store, AdamState& state);

}  // namespace cuenet::nn
