#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "cuenet/encoder/encoder.hpp"
#include "cuenet/text/token.hpp"

namespace cuenet::encoder {

struct LmEpochRecord {
  std::size_t epoch = 0;  // 1-based
  /// Eval-mode perplexity on the training corpus after the epoch.
  double train_perplexity = 0.0;
  std::optional<double> heldout_perplexity;
};

struct LmLog {
  /// Before any update, on the held-out slice when given, else the corpus.
  double initial_perplexity = 0.0;
  std::vector<LmEpochRecord> epochs;
  /// 0 when no epoch beat the untrained model.
  std::size_t best_epoch = 0;
  double best_perplexity = 0.0;
};

struct LmOptions {
  std::size_t epochs = 10;
  double lr = 1e-3;
  /// Sentences per optimizer step.
  std::size_t batch_size = 16;
  /// Global gradient-norm clip; 0 disables.
  double clip_norm = 5.0;
  std::uint64_t seed = 1;
  /// Written each time the selection perplexity improves.
  std::optional<std::filesystem::path> best_checkpoint;
  std::function<void(const LmEpochRecord&)> on_epoch;
};

struct LmEvaluation {
  double nll = 0.0;
  std::size_t predictions = 0;
  double perplexity() const;
};

/// Summed negative log-likelihood of the forward (next word) and backward
/// (previous word) predictions of every sentence. Sentences of one token
/// predict nothing.
LmEvaluation evaluate_lm(const EncoderModel& model, std::span<const text::TokenSequence> corpus);

/// Loss of one sentence; with `with_grad`, gradients accumulate in the
/// model's store. `train` enables LSTM-input dropout.
LmEvaluation lm_sentence_loss(EncoderModel& model, const text::TokenSequence& sentence,
                              bool with_grad, bool train = false, Rng* rng = nullptr);

/// A fresh encoder whose vocabularies come from `corpus`.
EncoderModel make_encoder(const EncoderConfig& config,
                          std::span<const text::TokenSequence> corpus, std::uint64_t seed);

/// Trains the biLM with Adam. Selection uses held-out perplexity when
/// `heldout` is non-empty, else training perplexity; on return the model
/// holds the best parameters seen. Throws EmptyCorpus when no sentence has
/// two tokens, UsageError when the model is frozen.
LmLog pretrain_lm(std::span<const text::TokenSequence> corpus, EncoderModel& model,
                  const LmOptions& options, std::span<const text::TokenSequence> heldout = {});

}  // namespace cuenet::encoder
