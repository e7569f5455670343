#include "cuenet/train/scheduler.hpp"

#include <cmath>
#include <limits>

#include "cuenet/error.hpp"

namespace cuenet::train {

PlateauScheduler::PlateauScheduler(double lr0, double factor, std::size_t patience,
                                   double min_lr)
    : lr0_(lr0),
      factor_(factor),
      patience_(patience),
      min_lr_(min_lr),
      lr_(lr0),
      best_(-std::numeric_limits<double>::infinity()) {
  if (!(lr0 > 0.0)) throw UsageError("lr0 must be positive");
  if (!(factor > 0.0 && factor < 1.0)) throw UsageError("decay_factor must be in (0, 1)");
  if (patience == 0) throw UsageError("plateau_patience must be at least 1");
  if (min_lr < 0.0) throw UsageError("min_lr must not be negative");
}

PlateauScheduler::Outcome PlateauScheduler::observe(double val_accuracy) {
  Outcome out;
  if (val_accuracy > best_) {
    best_ = val_accuracy;
    since_improvement_ = 0;
    out.improved = true;
    return out;
  }
  // One decay per plateau, on the epoch that exhausts the patience; the
  // next decay waits for an improvement followed by a new plateau.
  if (++since_improvement_ == patience_) {
    const double next = lr0_ * std::pow(factor_, static_cast<double>(decays_ + 1));
    if (next >= min_lr_) {
      ++decays_;
      lr_ = next;
      out.decayed = true;
    }
  }
  return out;
}

}  // namespace cuenet::train
