#pragma once

#include <cstddef>
#include <span>
#include <string>

#include "cuenet/nn/param_store.hpp"
#include "cuenet/nn/tensor.hpp"
#include "cuenet/rng.hpp"

namespace cuenet::nn {

/// Single-direction LSTM with gates stacked as [input; forget; cell; output]:
///
///   z_t = W_x x_t + W_h h_{t-1} + b
///   i = sigmoid(z_i)  f = sigmoid(z_f)  g = tanh(z_g)  o = sigmoid(z_o)
///   c_t = f * c_{t-1} + i * g
///   h_t = o * tanh(c_t)
///
/// Weights init uniform(-1/sqrt(h), 1/sqrt(h)); bias zero except +1 on the
/// forget gate.
class Lstm {
 public:
  struct Cache {
    Tensor x;       // [T x d_in]
    Tensor gates;   // [T x 4h], post-activation
    Tensor cells;   // [T x h]
    Tensor hidden;  // [T x h]
    Tensor h0, c0;  // [h]
  };
  struct Output {
    Tensor hidden;  // [T x h]
    Tensor h_final;
    Tensor c_final;
  };
  struct Gradients {
    Tensor dx;  // [T x d_in]
    Tensor dh0, dc0;
  };

  static Lstm create(ParamStore& store, const std::string& prefix, std::size_t input_size,
                     std::size_t hidden_size, Rng& rng, bool trainable = true);
  static Lstm bind(const ParamStore& store, const std::string& prefix);

  std::size_t input_size() const { return input_size_; }
  std::size_t hidden_size() const { return hidden_size_; }
  const std::string& prefix() const { return prefix_; }

  /// `h0`/`c0` default to zeros. Throws ShapeMismatch on inconsistent sizes.
  Output forward(const ParamStore& store, const Tensor& x, Cache* cache = nullptr,
                 const Tensor* h0 = nullptr, const Tensor* c0 = nullptr) const;

  /// Backpropagation through time. `d_hidden` is [T x h]; gradients of the
  /// final state may be added through `dh_final`/`dc_final`.
  Gradients backward(ParamStore& store, const Cache& cache, const Tensor& d_hidden,
                     const Tensor* dh_final = nullptr, const Tensor* dc_final = nullptr) const;

 private:
  std::string prefix_;
  std::size_t input_size_ = 0;
  std::size_t hidden_size_ = 0;
};

/// Forward LSTM over the sequence and backward LSTM over its reversal, joined
/// per timestep as [forward_t ; backward_t].
class BiLstm {
 public:
  struct Cache {
    Lstm::Cache fwd;
    Lstm::Cache bwd;
  };

  static BiLstm create(ParamStore& store, const std::string& prefix, std::size_t input_size,
                       std::size_t hidden_size, Rng& rng, bool trainable = true);
  static BiLstm bind(const ParamStore& store, const std::string& prefix);

  const Lstm& forward_lstm() const { return fwd_; }
  const Lstm& backward_lstm() const { return bwd_; }
  std::size_t output_size() const { return 2 * fwd_.hidden_size(); }

  /// [T x d_in] -> [T x 2h].
  Tensor forward(const ParamStore& store, const Tensor& x, Cache* cache = nullptr) const;
  Tensor backward(ParamStore& store, const Cache& cache, const Tensor& dy) const;

  /// Right-padded batch [B x T_max x d_in] -> [B x T_max x 2h]. Each row runs
  /// over its own length only; pad positions are set to `pad_value`.
  Tensor forward_padded(const ParamStore& store, const Tensor& x,
                        std::span<const std::size_t> lengths, double pad_value) const;

 private:
  Lstm fwd_;
  Lstm bwd_;
};

/// Row order reversed: [T x d] -> [T x d].
Tensor reverse_rows(const Tensor& x);

}  // namespace cuenet::nn
