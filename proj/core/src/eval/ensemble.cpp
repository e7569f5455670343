#include "cuenet/eval/ensemble.hpp"

#include "cuenet/error.hpp"

namespace cuenet::eval {

std::vector<Label> ensemble_vote(std::span<const std::vector<Label>> votes,
                                 std::span<const std::vector<double>> probabilities) {
  if (votes.empty()) throw UsageError("ensemble vote needs at least one member");
  const std::size_t n = votes.front().size();
  for (const auto& v : votes) {
    if (v.size() != n) throw LengthMismatch(n, v.size());
  }
  if (!probabilities.empty()) {
    if (probabilities.size() != votes.size()) {
      throw LengthMismatch(votes.size(), probabilities.size());
    }
    for (const auto& p : probabilities) {
      if (p.size() != n) throw LengthMismatch(n, p.size());
    }
  }
  const std::size_t k = votes.size();
  std::vector<Label> out(n, Label::negative);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t positive = 0;
    for (const auto& v : votes) positive += v[i] == Label::positive ? 1 : 0;
    if (2 * positive > k) {
      out[i] = Label::positive;
    } else if (2 * positive == k && !probabilities.empty()) {
      double mean = 0.0;
      for (const auto& p : probabilities) mean += p[i];
      mean /= static_cast<double>(k);
      if (mean >= 0.5) out[i] = Label::positive;
    }
  }
  return out;
}

}  // namespace cuenet::eval
