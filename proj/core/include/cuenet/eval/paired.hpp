#pragma once

#include <cstddef>
#include <functional>
#include <span>

#include "cuenet/classifier/model.hpp"
#include "cuenet/corpus/dataset.hpp"

namespace cuenet::eval {

struct PairedResult {
  std::size_t n_pairs = 0;
  std::size_t n_correct = 0;
  double accuracy = 0.0;
};

/// Probability that an example is sarcastic.
using SarcasmScorer = std::function<double(const corpus::Example&)>;

/// True when the statement with the strictly higher probability is the
/// sarcastic one; equal probabilities are never correct.
bool paired_choice_correct(double p_a, double p_b, corpus::Side sarcastic);

/// Throws UsageError when `pairs` is empty.
PairedResult sarc_paired_accuracy(std::span<const corpus::SarcPair> pairs,
                                  const SarcasmScorer& scorer);
PairedResult sarc_paired_accuracy(std::span<const corpus::SarcPair> pairs,
                                  const classifier::ClassifierModel& model);

}  // namespace cuenet::eval
