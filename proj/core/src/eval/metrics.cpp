#include "cuenet/eval/metrics.hpp"

#include "cuenet/error.hpp"

namespace cuenet::eval {

namespace {

double ratio(std::size_t num, std::size_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

double harmonic(double p, double r) { return p + r == 0.0 ? 0.0 : 2.0 * p * r / (p + r); }

}  // namespace

std::string_view to_string(Averaging averaging) {
  return averaging == Averaging::positive_class ? "positive_class" : "macro";
}

std::optional<Averaging> averaging_from_string(std::string_view s) {
  if (s == "positive_class" || s == "binary") return Averaging::positive_class;
  if (s == "macro") return Averaging::macro;
  return std::nullopt;
}

Metrics metrics_from_confusion(const Confusion& c, Averaging averaging) {
  Metrics m;
  m.confusion = c;
  m.averaging = averaging;
  m.accuracy = ratio(c.tp + c.tn, c.total());
  const double p1 = ratio(c.tp, c.tp + c.fp);
  const double r1 = ratio(c.tp, c.tp + c.fn);
  if (averaging == Averaging::positive_class) {
    m.precision = p1;
    m.recall = r1;
    m.f1 = harmonic(p1, r1);
  } else {
    // Class 0 as positive swaps the roles of tp/tn and fp/fn.
    const double p0 = ratio(c.tn, c.tn + c.fn);
    const double r0 = ratio(c.tn, c.tn + c.fp);
    m.precision = (p1 + p0) / 2.0;
    m.recall = (r1 + r0) / 2.0;
    m.f1 = (harmonic(p1, r1) + harmonic(p0, r0)) / 2.0;
  }
  return m;
}

Metrics compute_metrics(std::span<const Label> predictions, std::span<const Label> labels,
                        Averaging averaging) {
  if (predictions.size() != labels.size()) {
    throw LengthMismatch(predictions.size(), labels.size());
  }
  if (predictions.empty()) throw UsageError("metrics need at least one prediction");
  Confusion c;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const bool pred = predictions[i] == Label::positive;
    const bool gold = labels[i] == Label::positive;
    if (pred && gold) {
      ++c.tp;
    } else if (pred) {
      ++c.fp;
    } else if (gold) {
      ++c.fn;
    } else {
      ++c.tn;
    }
  }
  return metrics_from_confusion(c, averaging);
}

}  // namespace cuenet::eval
