#include "cuenet/nn/grad_check.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "cuenet/rng.hpp"

namespace cuenet::nn {

GradCheckResult grad_check(const LossFunction& loss, ParamStore& store,
                           const GradCheckOptions& options) {
  store.zero_grad();
  loss(store, true);
  std::vector<Tensor> analytic;
  analytic.reserve(store.size());
  for (const auto& p : store.entries()) analytic.push_back(p.grad);
  store.zero_grad();

  // (entry, index) pairs over trainable entries.
  std::vector<std::pair<std::size_t, std::size_t>> coords;
  for (std::size_t e = 0; e < store.size(); ++e) {
    const auto& p = store.entries()[e];
    if (!p.trainable) continue;
    for (std::size_t i = 0; i < p.value.size(); ++i) coords.emplace_back(e, i);
  }
  if (coords.size() > options.coordinates) {
    Rng rng(options.seed);
    for (std::size_t i = 0; i < options.coordinates; ++i) {
      std::swap(coords[i], coords[i + rng.index(coords.size() - i)]);
    }
    coords.resize(options.coordinates);
  }

  GradCheckResult result;
  const double h = options.step;
  const double f0 = loss(store, false);
  for (const auto& [e, i] : coords) {
    double& theta = store.entries()[e].value[i];
    const double saved = theta;
    theta = saved + h;
    const double f_plus = loss(store, false);
    theta = saved - h;
    const double f_minus = loss(store, false);
    theta = saved;

    const double slope_plus = (f_plus - f0) / h;
    const double slope_minus = (f0 - f_minus) / h;
    const double scale = std::max({1.0, std::abs(slope_plus), std::abs(slope_minus)});
    // Also catches kinks with tiny slopes, e.g. a ReLU sitting exactly at 0
    // with one flat side. A smooth coordinate only trips this when its
    // gradient is within about h * curvature of zero.
    const double larger = std::max(std::abs(slope_plus), std::abs(slope_minus));
    const bool lopsided = larger > 1e-9 && std::abs(slope_plus - slope_minus) > 0.5 * larger;
    if (lopsided || std::abs(slope_plus - slope_minus) > options.kink_tolerance * scale) {
      ++result.skipped;
      continue;
    }
    const double numeric = (f_plus - f_minus) / (2.0 * h);
    const double a = analytic[e][i];
    const double err =
        std::abs(a - numeric) / std::max({std::abs(a), std::abs(numeric), options.denominator_floor});
    ++result.checked;
    if (err > result.max_relative_error) {
      result.max_relative_error = err;
      result.worst_parameter = store.entries()[e].name;
      result.worst_index = i;
      result.worst_analytic = a;
      result.worst_numeric = numeric;
    }
  }
  store.zero_grad();
  return result;
}

}  // namespace cuenet::nn
