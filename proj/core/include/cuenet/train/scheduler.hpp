#pragma once

#include <cstddef>

namespace cuenet::train {

/// Validation-accuracy plateau decay. An epoch improves when its accuracy
/// is strictly above the best so far. A plateau is a run of non-improving
/// epochs; when it reaches `patience` epochs the rate becomes
/// lr0 * factor^(k+1), once. A longer plateau does not decay again: the
/// next decay needs an improvement and then a fresh plateau. A decay that
/// would fall below `min_lr` is skipped.
class PlateauScheduler {
 public:
  PlateauScheduler(double lr0, double factor, std::size_t patience, double min_lr);

  struct Outcome {
    bool improved = false;
    bool decayed = false;
  };
  Outcome observe(double val_accuracy);

  double lr() const { return lr_; }
  std::size_t decays() const { return decays_; }
  /// -infinity before the first observation.
  double best() const { return best_; }
  /// Length of the current plateau.
  std::size_t epochs_since_improvement() const { return since_improvement_; }

 private:
  double lr0_;
  double factor_;
  std::size_t patience_;
  double min_lr_;
  double lr_;
  double best_;
  std::size_t decays_ = 0;
  std::size_t since_improvement_ = 0;
};

}  // namespace cuenet::train
