#include "cuenet/nn/adam.hpp"

#include <cmath>

#include "cuenet/error.hpp"

namespace cuenet::nn {

AdamState::AdamState(double learning_rate) { set_learning_rate(learning_rate); }

void AdamState::set_learning_rate(double lr) {
  if (!(lr > 0.0) || !std::isfinite(lr)) throw UsageError("learning rate must be positive");
  learning_rate_ = lr;
}

void adam_step(ParamStore& store, AdamState& state) {
  for (const auto& p : store.entries()) {
    if (p.trainable && !p.grad.all_finite()) throw NonFiniteGradient(p.name);
  }
  ++state.step_;
  const double t = static_cast<double>(state.step_);
  const double correction1 = 1.0 - std::pow(AdamState::kBeta1, t);
  const double correction2 = 1.0 - std::pow(AdamState::kBeta2, t);
  const double lr = state.learning_rate_;
  for (auto& p : store.entries()) {
    if (!p.trainable) continue;
    auto [it, inserted] = state.moments_.try_emplace(p.name);
    auto& mom = it->second;
    if (inserted) {
      mom.m = Tensor(p.value.shape());
      mom.v = Tensor(p.value.shape());
    }
    for (std::size_t i = 0; i < p.value.size(); ++i) {
      const double g = p.grad[i];
      mom.m[i] = AdamState::kBeta1 * mom.m[i] + (1.0 - AdamState::kBeta1) * g;
      mom.v[i] = AdamState::kBeta2 * mom.v[i] + (1.0 - AdamState::kBeta2) * g * g;
      const double m_hat = mom.m[i] / correction1;
      const double v_hat = mom.v[i] / correction2;
      p.value[i] -= lr * m_hat / (std::sqrt(v_hat) + AdamState::kEpsilon);
    }
  }
  store.zero_grad();
}

}  // namespace cuenet::nn
