#include "cuenet/eval/paired.hpp"

#include "cuenet/error.hpp"

namespace cuenet::eval {

bool paired_choice_correct(double p_a, double p_b, corpus::Side sarcastic) {
  if (p_a == p_b) return false;
  return (p_a > p_b ? corpus::Side::a : corpus::Side::b) == sarcastic;
}

PairedResult sarc_paired_accuracy(std::span<const corpus::SarcPair> pairs,
                                  const SarcasmScorer& scorer) {
  if (pairs.empty()) throw UsageError("paired evaluation needs at least one pair");
  PairedResult r;
  r.n_pairs = pairs.size();
  for (const auto& pair : pairs) {
    if (paired_choice_correct(scorer(pair.statement_a), scorer(pair.statement_b),
                              pair.sarcastic_index)) {
      ++r.n_correct;
    }
  }
  r.accuracy = static_cast<double>(r.n_correct) / static_cast<double>(r.n_pairs);
  return r;
}

PairedResult sarc_paired_accuracy(std::span<const corpus::SarcPair> pairs,
                                  const classifier::ClassifierModel& model) {
  return sarc_paired_accuracy(pairs, [&model](const corpus::Example& ex) {
    return model.predict(ex).p_sarcastic;
  });
}

}  // namespace cuenet::eval
