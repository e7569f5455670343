#include "cuenet/classifier/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cuenet/error.hpp"

namespace cuenet::classifier {

using nn::Tensor;

namespace {
constexpr std::size_t kClasses = 2;
}

Prediction prediction_from_logits(const Tensor& logits) {
  expect_shape(logits, {kClasses}, "classifier logits");
  const Tensor p = nn::softmax(logits);
  return Prediction{logits[1] > logits[0] ? Label::positive : Label::negative, p[1]};
}

ClassifierModel::ClassifierModel(ClassifierConfig config,
                                 std::shared_ptr<const encoder::EncoderModel> encoder)
    : config_(std::move(config)), encoder_(std::move(encoder)) {
  if (!encoder_) throw UsageError("classifier needs an encoder");
  config_.validate();
  if (config_.d_ctx != encoder_->config().d_ctx()) {
    throw ShapeMismatch("classifier d_ctx " + std::to_string(config_.d_ctx) +
                        " differs from encoder width " +
                        std::to_string(encoder_->config().d_ctx()));
  }
}

ClassifierModel::ClassifierModel(ClassifierConfig config,
                                 std::shared_ptr<const encoder::EncoderModel> encoder,
                                 std::uint64_t seed)
    : ClassifierModel(std::move(config), std::move(encoder)) {
  Rng rng(seed);
  if (encoder_->config().mix_mode == encoder::MixMode::learned_scalar_mix) {
    encoder::ScalarMix::create(params_, "mix", encoder_->mix_width());
  }
  nn::BiLstm::create(params_, "bilstm", config_.d_ctx, config_.lstm_hidden, rng);
  nn::FeedForward::create(params_, "ffn", 2 * config_.lstm_hidden, config_.ffn_units, kClasses,
                          rng);
  bind_layers();
}

ClassifierModel ClassifierModel::from_parts(ClassifierConfig config,
                                            std::shared_ptr<const encoder::EncoderModel> encoder,
                                            nn::ParamStore params) {
  const ClassifierModel reference(config, encoder, 0);
  for (const auto& p : reference.params_.entries()) {
    if (!params.contains(p.name)) {
      throw ShapeMismatch("classifier parameter '" + p.name + "' missing");
    }
    if (params.value(p.name).shape() != p.value.shape()) {
      throw ShapeMismatch("classifier parameter '" + p.name + "' is " +
                          nn::shape_string(params.value(p.name).shape()) + ", expected " +
                          nn::shape_string(p.value.shape()));
    }
  }
  if (params.size() != reference.params_.size()) {
    throw ShapeMismatch("classifier has unexpected extra parameters");
  }
  ClassifierModel m(std::move(config), std::move(encoder));
  m.params_ = std::move(params);
  m.bind_layers();
  return m;
}

void ClassifierModel::bind_layers() {
  if (params_.contains("mix/weights")) mix_ = encoder::ScalarMix::bind(params_, "mix");
  lstm_ = nn::BiLstm::bind(params_, "bilstm");
  ffn_ = nn::FeedForward::bind(params_, "ffn");
}

Features ClassifierModel::features(std::span<const text::Token> tokens) const {
  if (tokens.empty()) throw UsageError("cannot classify an empty token sequence");
  encoder::LayerOutputs out = encoder_->layers(tokens);
  Features f;
  if (mix_) {
    f.layers = encoder_->mix_inputs(out);
  } else {
    f.layers.push_back(std::move(out.layers.back()));
  }
  return f;
}

Tensor ClassifierModel::mixed_input(const Features& features,
                                    encoder::ScalarMix::Cache* cache) const {
  if (mix_) return mix_->forward(params_, features.layers, cache);
  if (features.layers.size() != 1) throw ShapeMismatch("expected a single encoder layer");
  return features.layers.front();
}

Tensor ClassifierModel::forward_features(const Features& features, bool train, Rng* rng,
                                         Cache* cache) const {
  Cache local;
  Cache& c = cache ? *cache : local;
  c.features = &features;
  const double p = config_.dropout_p;
  const Tensor x = nn::dropout_forward(mixed_input(features, &c.mix), p, train, rng, &c.input_drop);
  const Tensor states = lstm_.forward(params_, x, &c.lstm);
  c.pool = nn::max_pool_time(states);
  const Tensor pooled = nn::dropout_forward(c.pool.pooled, p, train, rng, &c.pool_drop);
  return ffn_.forward(params_, pooled, p, train, rng, &c.ffn);
}

void ClassifierModel::backward(const Cache& cache, const Tensor& dlogits) {
  Tensor d = ffn_.backward(params_, cache.ffn, dlogits);
  d = nn::dropout_backward(cache.pool_drop, d);
  d = nn::max_pool_time_backward(cache.pool, d);
  d = lstm_.backward(params_, cache.lstm, d);
  if (mix_) {
    d = nn::dropout_backward(cache.input_drop, d);
    mix_->backward(params_, cache.features->layers, cache.mix, d);
  }
}

Tensor ClassifierModel::forward(const corpus::Example& example, bool train, Rng* rng) const {
  const Features f = features(example.tokens);
  return forward_features(f, train, rng);
}

Tensor ClassifierModel::forward_batch(std::span<const corpus::Example> examples) const {
  if (examples.empty()) throw UsageError("empty batch");
  std::vector<Tensor> inputs;
  std::vector<std::size_t> lengths;
  std::size_t t_max = 0;
  for (const auto& ex : examples) {
    inputs.push_back(mixed_input(features(ex.tokens), nullptr));
    lengths.push_back(inputs.back().rows());
    t_max = std::max(t_max, lengths.back());
  }
  const std::size_t d = config_.d_ctx;
  Tensor padded({examples.size(), t_max, d});
  for (std::size_t b = 0; b < inputs.size(); ++b) {
    std::copy(inputs[b].values().begin(), inputs[b].values().end(),
              padded.data() + b * t_max * d);
  }
  const double neg_inf = -std::numeric_limits<double>::infinity();
  const Tensor states = lstm_.forward_padded(params_, padded, lengths, neg_inf);
  const std::size_t width = lstm_.output_size();
  Tensor pooled({examples.size(), width});
  for (std::size_t b = 0; b < examples.size(); ++b) {
    Tensor rows({t_max, width});
    std::copy_n(states.data() + b * t_max * width, t_max * width, rows.data());
    const auto pool = nn::max_pool_time(rows);
    std::copy(pool.pooled.values().begin(), pool.pooled.values().end(), pooled.row(b).begin());
  }
  return ffn_.forward(params_, pooled, config_.dropout_p, false, nullptr);
}

Prediction ClassifierModel::predict(const corpus::Example& example) const {
  return prediction_from_logits(forward(example, false));
}

}  // namespace cuenet::classifier
