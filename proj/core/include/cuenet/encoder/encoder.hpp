#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cuenet/encoder/config.hpp"
#include "cuenet/encoder/vocab.hpp"
#include "cuenet/nn/layers.hpp"
#include "cuenet/nn/loss.hpp"
#include "cuenet/nn/lstm.hpp"
#include "cuenet/nn/param_store.hpp"
#include "cuenet/rng.hpp"
#include "cuenet/nn/tensor.hpp"
#include "cuenet/text/token.hpp"

namespace cuenet::encoder {

/// Every activation the encoder exposes for one sentence of T tokens.
struct LayerOutputs {
  nn::Tensor words;                // [T x d_word], context-free
  std::vector<nn::Tensor> layers;  // n_layers entries, each [T x 2*d_lm]

  const nn::Tensor& top() const { return layers.back(); }
};

/// Softmax-normalized weights over the encoder layers and a global scale:
/// y = gamma * sum_j softmax(w)_j * x_j. Weights start equal and gamma at 1.
struct ScalarMix {
  std::string weights;  // [n]
  std::string gamma;    // [1]
  std::size_t inputs = 0;

  struct Cache {
    std::vector<double> s;
    nn::Tensor mixed;  // sum_j s_j x_j, before gamma
  };

  static ScalarMix create(nn::ParamStore& store, const std::string& prefix, std::size_t inputs);
  static ScalarMix bind(const nn::ParamStore& store, const std::string& prefix);

  nn::Tensor forward(const nn::ParamStore& store, std::span<const nn::Tensor> xs,
                     Cache* cache = nullptr) const;
  /// Gradients of the mix parameters only; the inputs are frozen features.
  void backward(nn::ParamStore& store, std::span<const nn::Tensor> xs, const Cache& cache,
                const nn::Tensor& dy) const;
};

/// Character CNN word encoder followed by a forward and a backward LSTM
/// stack. The stacks are kept separate so the forward states never see
/// later words (and vice versa), which the language-model objective
/// requires; layer k of the output joins both directions' layer k.
///
/// Parameter names: char_embed, char_cnn/w<width>/{weight,bias},
/// highway/<k>/..., projection/{weight,bias},
/// bilm/{fwd,bwd}/<k>/{w_input,w_hidden,bias}, lm/softmax/{weight,bias}.
class EncoderModel {
 public:
  EncoderModel(EncoderConfig config, CharVocab chars, WordVocab words, std::uint64_t seed);
  /// Wraps existing parameters; throws ShapeMismatch if any is missing or
  /// sized differently from what `config` and the vocabularies imply.
  static EncoderModel from_parts(EncoderConfig config, CharVocab chars, WordVocab words,
                                 nn::ParamStore params);

  const EncoderConfig& config() const { return config_; }
  const CharVocab& char_vocab() const { return chars_; }
  const WordVocab& word_vocab() const { return words_; }
  const nn::ParamStore& params() const { return params_; }
  nn::ParamStore& params() { return params_; }

  /// Marks every parameter non-trainable.
  void freeze();
  bool frozen() const;

  /// [d_word] vector of a single non-empty word.
  nn::Tensor encode_word(std::string_view word) const;
  /// [T x d_word]; throws UsageError on an empty sentence.
  nn::Tensor encode_words(std::span<const text::Token> sentence) const;
  LayerOutputs layers(std::span<const text::Token> sentence) const;

  /// Number of layers a scalar mix combines: the character layer plus the
  /// LSTM layers.
  std::size_t mix_width() const { return config_.n_layers + 1; }
  /// The character layer widened to d_ctx followed by the LSTM layers.
  std::vector<nn::Tensor> mix_inputs(const LayerOutputs& outputs) const;

  /// [T x d_ctx]. In top_layer mode this is the top layer. In
  /// learned_scalar_mix mode `mix` (whose parameters live in `mix_store`)
  /// combines mix_inputs(); without one, layers are weighted equally.
  nn::Tensor contextualize(std::span<const text::Token> sentence,
                           const ScalarMix* mix = nullptr,
                           const nn::ParamStore* mix_store = nullptr) const;

  // Language-model training path.

  struct ForwardCache {
    std::vector<std::vector<std::size_t>> char_ids;
    std::vector<std::vector<nn::CharConv::Cache>> conv;
    std::vector<nn::Highway::Cache> highway;
    nn::Tensor projected_input;  // input of the projection
    std::vector<nn::Lstm::Cache> fwd;
    std::vector<nn::Lstm::Cache> bwd;
    std::vector<nn::DropoutMask> fwd_drop;
    std::vector<nn::DropoutMask> bwd_drop;
  };

  /// Like layers(), optionally with LSTM-input dropout (`train`) and a
  /// cache for backward().
  LayerOutputs forward(std::span<const text::Token> sentence, bool train, Rng* rng,
                       ForwardCache* cache) const;
  /// Accumulates parameter gradients given d(loss)/d(top layer) [T x 2*d_lm].
  void backward(const ForwardCache& cache, const nn::Tensor& d_top);

  const nn::Linear& lm_softmax() const { return softmax_; }

 private:
  EncoderModel(EncoderConfig config, CharVocab chars, WordVocab words);
  void bind_layers();
  nn::Tensor encode_ids(const std::vector<std::vector<std::size_t>>& ids,
                        ForwardCache* cache) const;

  EncoderConfig config_;
  CharVocab chars_;
  WordVocab words_;
  nn::ParamStore params_;

  nn::Embedding char_embed_;
  std::vector<nn::CharConv> convs_;
  std::vector<nn::Highway> highways_;
  nn::Linear projection_;
  std::vector<nn::Lstm> fwd_;
  std::vector<nn::Lstm> bwd_;
  nn::Linear softmax_;
};

}  // namespace cuenet::encoder
