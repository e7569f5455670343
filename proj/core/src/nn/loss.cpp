#include "cuenet/nn/loss.hpp"

#include <algorithm>
#include <cmath>

#include "cuenet/error.hpp"

namespace cuenet::nn {

double log_sum_exp(const Tensor& logits) {
  const auto v = logits.values();
  const double m = *std::max_element(v.begin(), v.end());
  double s = 0.0;
  for (double x : v) s += std::exp(x - m);
  return m + std::log(s);
}

Tensor softmax(const Tensor& logits) {
  const double lse = log_sum_exp(logits);
  Tensor p(logits.shape());
  for (std::size_t i = 0; i < p.size(); ++i) p[i] = std::exp(logits[i] - lse);
  return p;
}

double cross_entropy(const Tensor& logits, std::size_t target, Tensor* dlogits) {
  if (logits.rank() != 1 || target >= logits.size()) {
    throw ShapeMismatch("cross entropy target " + std::to_string(target) + " for logits " +
                        shape_string(logits.shape()));
  }
  const double lse = log_sum_exp(logits);
  if (dlogits) {
    *dlogits = Tensor(logits.shape());
    for (std::size_t i = 0; i < logits.size(); ++i) (*dlogits)[i] = std::exp(logits[i] - lse);
    (*dlogits)[target] -= 1.0;
  }
  return lse - logits[target];
}

}  // namespace cuenet::nn
