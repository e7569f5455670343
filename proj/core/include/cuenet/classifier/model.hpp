#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "cuenet/classifier/config.hpp"
#include "cuenet/corpus/dataset.hpp"
#include "cuenet/encoder/encoder.hpp"
#include "cuenet/label.hpp"
#include "cuenet/nn/layers.hpp"
#include "cuenet/nn/lstm.hpp"
#include "cuenet/nn/param_store.hpp"
#include "cuenet/rng.hpp"

namespace cuenet::classifier {

struct Prediction {
  Label label = Label::negative;
  double p_sarcastic = 0.5;
};

/// Softmax of a [2] logit vector; label 1 only when its logit is strictly
/// larger.
Prediction prediction_from_logits(const nn::Tensor& logits);

/// Frozen encoder output for one example: the top layer, or every layer a
/// scalar mix combines. Deterministic, so training computes it once.
struct Features {
  std::vector<nn::Tensor> layers;  // each [T x d_ctx]
  std::size_t length() const { return layers.front().rows(); }
};

/// BiLSTM over contextual vectors, max-pooled over time, then a
/// feed-forward head producing two logits. Dropout (rate dropout_p) hits
/// the encoder output, the pooled vector and each hidden FFN layer, and
/// only in train mode. In learned_scalar_mix mode the mix parameters are
/// part of this model's trainable store; the encoder is never updated.
class ClassifierModel {
 public:
  ClassifierModel(ClassifierConfig config, std::shared_ptr<const encoder::EncoderModel> encoder,
                  std::uint64_t seed);
  /// Throws ShapeMismatch when `params` does not match the architecture.
  static ClassifierModel from_parts(ClassifierConfig config,
                                    std::shared_ptr<const encoder::EncoderModel> encoder,
                                    nn::ParamStore params);

  const ClassifierConfig& config() const { return config_; }
  const encoder::EncoderModel& encoder() const { return *encoder_; }
  std::shared_ptr<const encoder::EncoderModel> shared_encoder() const { return encoder_; }
  const nn::ParamStore& params() const { return params_; }
  nn::ParamStore& params() { return params_; }
  bool uses_mix() const { return mix_.has_value(); }

  /// Throws UsageError on an empty token sequence.
  Features features(std::span<const text::Token> tokens) const;

  struct Cache {
    const Features* features = nullptr;
    encoder::ScalarMix::Cache mix;
    nn::DropoutMask input_drop;
    nn::BiLstm::Cache lstm;
    nn::MaxPoolResult pool;
    nn::DropoutMask pool_drop;
    nn::FeedForward::Cache ffn;
  };

  /// Logits [2]. `rng` is required in train mode. The cache keeps a pointer
  /// to `features`, which must outlive backward().
  nn::Tensor forward_features(const Features& features, bool train, Rng* rng,
                              Cache* cache = nullptr) const;
  /// Accumulates gradients of the classifier parameters.
  void backward(const Cache& cache, const nn::Tensor& dlogits);

  nn::Tensor forward(const corpus::Example& example, bool train, Rng* rng = nullptr) const;
  /// Eval-mode logits [B x 2] from one right-padded, masked BiLSTM pass.
  nn::Tensor forward_batch(std::span<const corpus::Example> examples) const;
  Prediction predict(const corpus::Example& example) const;

 private:
  ClassifierModel(ClassifierConfig config, std::shared_ptr<const encoder::EncoderModel> encoder);
  void bind_layers();
  nn::Tensor mixed_input(const Features& features, encoder::ScalarMix::Cache* cache) const;

  ClassifierConfig config_;
  std::shared_ptr<const encoder::EncoderModel> encoder_;
  nn::ParamStore params_;
  std::optional<encoder::ScalarMix> mix_;
  nn::BiLstm lstm_;
  nn::FeedForward ffn_;
};

}  // namespace cuenet::classifier
