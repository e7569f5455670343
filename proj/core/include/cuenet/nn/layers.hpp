#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "cuenet/nn/param_store.hpp"
#include "cuenet/nn/tensor.hpp"
#include "cuenet/rng.hpp"

namespace cuenet::nn {

// Layers own parameter names and sizes, never values: forward() reads from a
// ParamStore and backward() accumulates into its gradient slots. Inputs are
// rank-2 [rows x features] unless stated otherwise.

/// y = x W^T + b with W [out x in]. Xavier-uniform weights, zero bias.
struct Linear {
  std::string weight;
  std::string bias;
  std::size_t in = 0;
  std::size_t out = 0;

  static Linear create(ParamStore& store, const std::string& prefix, std::size_t in,
                       std::size_t out, Rng& rng, bool trainable = true);
  static Linear bind(const ParamStore& store, const std::string& prefix);

  /// Accepts [in] or [N x in]; the result has the same rank.
  Tensor forward(const ParamStore& store, const Tensor& x) const;
  Tensor backward(ParamStore& store, const Tensor& x, const Tensor& dy) const;
};

/// Lookup table [vocab x dim], uniform(-1, 1) init.
struct Embedding {
  std::string table;
  std::size_t vocab = 0;
  std::size_t dim = 0;

  static Embedding create(ParamStore& store, const std::string& name, std::size_t vocab,
                          std::size_t dim, Rng& rng, bool trainable = true);
  static Embedding bind(const ParamStore& store, const std::string& name);

  Tensor forward(const ParamStore& store, std::span<const std::size_t> ids) const;
  void backward(ParamStore& store, std::span<const std::size_t> ids, const Tensor& dy) const;
};

/// One filter group of a character CNN: `count` filters of `width` over
/// [L x d_char] embeddings. Valid convolution plus bias, tanh, then max over
/// positions, so the output is [count] for any L. Inputs shorter than
/// `width` are zero-padded on the right.
struct CharConv {
  std::string weight;  // [count x width*d_char]
  std::string bias;    // [count]
  std::size_t width = 0;
  std::size_t count = 0;
  std::size_t d_char = 0;

  struct Cache {
    Tensor padded;  // [max(L, width) x d_char]
    std::size_t rows = 0;
    std::vector<std::size_t> argmax;
    Tensor output;
  };

  static CharConv create(ParamStore& store, const std::string& prefix, std::size_t width,
                         std::size_t count, std::size_t d_char, Rng& rng, bool trainable = true);
  static CharConv bind(const ParamStore& store, const std::string& prefix, std::size_t width,
                       std::size_t d_char);

  Tensor forward(const ParamStore& store, const Tensor& x, Cache* cache = nullptr) const;
  /// Gradient with respect to the unpadded input.
  Tensor backward(ParamStore& store, const Cache& cache, const Tensor& dy) const;
};

/// y = t * relu(W_h x + b_h) + (1 - t) * x with t = sigmoid(W_t x + b_t).
struct Highway {
  Linear transform;
  Linear gate;

  struct Cache {
    Tensor x, h_pre, t;
  };

  static Highway create(ParamStore& store, const std::string& prefix, std::size_t dim, Rng& rng,
                        bool trainable = true);
  static Highway bind(const ParamStore& store, const std::string& prefix);

  Tensor forward(const ParamStore& store, const Tensor& x, Cache* cache = nullptr) const;
  Tensor backward(ParamStore& store, const Cache& cache, const Tensor& dy) const;
};

/// Elementwise max over rows of [T x d]; -infinity rows never win unless a
/// column holds nothing else.
struct MaxPoolResult {
  Tensor pooled;                    // [d]
  std::vector<std::size_t> argmax;  // per column
  std::size_t rows = 0;
};
MaxPoolResult max_pool_time(const Tensor& states);
Tensor max_pool_time_backward(const MaxPoolResult& fwd, const Tensor& dy);

/// Inverted dropout: kept units are scaled by 1/(1-p) so inference needs no
/// rescaling. The mask doubles as the backward multiplier.
struct DropoutMask {
  std::vector<double> scale;
};
Tensor dropout_forward(const Tensor& x, double p, bool train, Rng* rng, DropoutMask* mask);
Tensor dropout_backward(const DropoutMask& mask, const Tensor& dy);

Tensor relu(const Tensor& x);
/// dy where the forward input was positive, 0 elsewhere (including x == 0).
Tensor relu_backward(const Tensor& x, const Tensor& dy);

/// Classification head: linear -> ReLU -> dropout -> linear -> ReLU ->
/// dropout -> linear to `classes` logits.
struct FeedForward {
  Linear hidden1;
  Linear hidden2;
  Linear output;

  struct Cache {
    Tensor x, a1, h1, a2, h2;
    DropoutMask drop1, drop2;
  };

  static FeedForward create(ParamStore& store, const std::string& prefix, std::size_t in,
                            std::size_t units, std::size_t classes, Rng& rng,
                            bool trainable = true);
  static FeedForward bind(const ParamStore& store, const std::string& prefix);

  Tensor forward(const ParamStore& store, const Tensor& x, double dropout, bool train, Rng* rng,
                 Cache* cache = nullptr) const;
  Tensor backward(ParamStore& store, const Cache& cache, const Tensor& dlogits) const;
};

}  // namespace cuenet::nn
