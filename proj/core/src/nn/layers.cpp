#include "cuenet/nn/layers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cuenet/error.hpp"
#include "nn/kernels.hpp"

namespace cuenet::nn {

using detail::mat;
using detail::vec;

namespace {

void xavier_uniform(Tensor& w, std::size_t fan_in, std::size_t fan_out, Rng& rng) {
  const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  for (double& v : w.values()) v = rng.uniform(-limit, limit);
}

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

}  // namespace

// --- Linear ---

Linear Linear::create(ParamStore& store, const std::string& prefix, std::size_t in,
                      std::size_t out, Rng& rng, bool trainable) {
  Linear l{prefix + "/weight", prefix + "/bias", in, out};
  xavier_uniform(store.add(l.weight, {out, in}, trainable).value, in, out, rng);
  store.add(l.bias, {out}, trainable);
  return l;
}

Linear Linear::bind(const ParamStore& store, const std::string& prefix) {
  Linear l{prefix + "/weight", prefix + "/bias", 0, 0};
  const auto& w = store.value(l.weight);
  l.out = w.dim(0);
  l.in = w.dim(1);
  return l;
}

Tensor Linear::forward(const ParamStore& store, const Tensor& x) const {
  if (x.cols() != in) {
    throw ShapeMismatch("linear " + weight + " expects width " + std::to_string(in) + ", got " +
                        shape_string(x.shape()));
  }
  const Tensor& w = store.value(weight);
  const Tensor& b = store.value(bias);
  Tensor y = x.rank() == 1 ? Tensor({out}) : Tensor({x.dim(0), out});
  auto ym = mat(y);
  ym.noalias() = mat(x) * mat(w).transpose();
  ym.rowwise() += vec(b).transpose();
  return y;
}

Tensor Linear::backward(ParamStore& store, const Tensor& x, const Tensor& dy) const {
  auto& w = store.at(weight);
  auto& b = store.at(bias);
  mat(w.grad).noalias() += mat(dy).transpose() * mat(x);
  vec(b.grad) += mat(dy).colwise().sum().transpose();
  Tensor dx(x.shape());
  mat(dx).noalias() = mat(dy) * mat(w.value);
  return dx;
}

// --- Embedding ---

Embedding Embedding::create(ParamStore& store, const std::string& name, std::size_t vocab,
                            std::size_t dim, Rng& rng, bool trainable) {
  auto& p = store.add(name, {vocab, dim}, trainable);
  for (double& v : p.value.values()) v = rng.uniform(-1.0, 1.0);
  return Embedding{name, vocab, dim};
}

Embedding Embedding::bind(const ParamStore& store, const std::string& name) {
  const auto& t = store.value(name);
  return Embedding{name, t.dim(0), t.dim(1)};
}

Tensor Embedding::forward(const ParamStore& store, std::span<const std::size_t> ids) const {
  if (ids.empty()) throw ShapeMismatch("embedding lookup of zero ids");
  const Tensor& t = store.value(table);
  Tensor out({ids.size(), dim});
  for (std::size_t r = 0; r < ids.size(); ++r) {
    if (ids[r] >= vocab) throw ShapeMismatch("embedding id out of range in " + table);
    std::copy_n(t.row(ids[r]).data(), dim, out.row(r).data());
  }
  return out;
}

void Embedding::backward(ParamStore& store, std::span<const std::size_t> ids,
                         const Tensor& dy) const {
  auto& g = store.grad(table);
  for (std::size_t r = 0; r < ids.size(); ++r) {
    auto dst = g.row(ids[r]);
    auto src = dy.row(r);
    for (std::size_t c = 0; c < dim; ++c) dst[c] += src[c];
  }
}

// --- CharConv ---

CharConv CharConv::create(ParamStore& store, const std::string& prefix, std::size_t width,
                          std::size_t count, std::size_t d_char, Rng& rng, bool trainable) {
  CharConv c{prefix + "/weight", prefix + "/bias", width, count, d_char};
  xavier_uniform(store.add(c.weight, {count, width * d_char}, trainable).value, width * d_char,
                 count, rng);
  store.add(c.bias, {count}, trainable);
  return c;
}

CharConv CharConv::bind(const ParamStore& store, const std::string& prefix, std::size_t width,
                        std::size_t d_char) {
  CharConv c{prefix + "/weight", prefix + "/bias", width, 0, d_char};
  const auto& w = store.value(c.weight);
  if (w.rank() != 2 || w.dim(1) != width * d_char) {
    throw ShapeMismatch(c.weight + " is " + shape_string(w.shape()) + ", expected width " +
                        std::to_string(width) + " x " + std::to_string(d_char));
  }
  c.count = w.dim(0);
  return c;
}

Tensor CharConv::forward(const ParamStore& store, const Tensor& x, Cache* cache) const {
  if (x.rank() != 2 || x.cols() != d_char) {
    throw ShapeMismatch("char conv expects [L x " + std::to_string(d_char) + "], got " +
                        shape_string(x.shape()));
  }
  const std::size_t rows = x.rows();
  const std::size_t padded_rows = std::max(rows, width);
  Tensor padded({padded_rows, d_char});
  std::copy(x.values().begin(), x.values().end(), padded.values().begin());

  const std::size_t positions = padded_rows - width + 1;
  using Strided = Eigen::Map<const detail::RowMatrix, 0, Eigen::OuterStride<>>;
  Strided windows(padded.data(), static_cast<Eigen::Index>(positions),
                  static_cast<Eigen::Index>(width * d_char),
                  Eigen::OuterStride<>(static_cast<Eigen::Index>(d_char)));
  const Tensor& w = store.value(weight);
  const Tensor& b = store.value(bias);
  detail::RowMatrix z = windows * mat(w).transpose();
  z.rowwise() += vec(b).transpose();

  Tensor out({count});
  std::vector<std::size_t> argmax(count, 0);
  for (std::size_t f = 0; f < count; ++f) {
    Eigen::Index best = 0;
    const double m = z.col(static_cast<Eigen::Index>(f)).maxCoeff(&best);
    argmax[f] = static_cast<std::size_t>(best);
    out[f] = std::tanh(m);
  }
  if (cache) {
    cache->padded = std::move(padded);
    cache->rows = rows;
    cache->argmax = std::move(argmax);
    cache->output = out;
  }
  return out;
}

Tensor CharConv::backward(ParamStore& store, const Cache& cache, const Tensor& dy) const {
  auto& w = store.at(weight);
  auto& b = store.at(bias);
  const std::size_t span = width * d_char;
  Tensor dpadded(cache.padded.shape());
  for (std::size_t f = 0; f < count; ++f) {
    const double dz = dy[f] * (1.0 - cache.output[f] * cache.output[f]);
    if (dz == 0.0) continue;
    const double* window = cache.padded.data() + cache.argmax[f] * d_char;
    double* wg = w.grad.data() + f * span;
    const double* wv = w.value.data() + f * span;
    double* dx = dpadded.data() + cache.argmax[f] * d_char;
    for (std::size_t k = 0; k < span; ++k) {
      wg[k] += dz * window[k];
      dx[k] += dz * wv[k];
    }
    b.grad[f] += dz;
  }
  Tensor dx({cache.rows, d_char});
  std::copy_n(dpadded.data(), dx.size(), dx.data());
  return dx;
}

// --- Highway ---

Highway Highway::create(ParamStore& store, const std::string& prefix, std::size_t dim, Rng& rng,
                        bool trainable) {
  return Highway{Linear::create(store, prefix + "/transform", dim, dim, rng, trainable),
                 Linear::create(store, prefix + "/gate", dim, dim, rng, trainable)};
}

Highway Highway::bind(const ParamStore& store, const std::string& prefix) {
  return Highway{Linear::bind(store, prefix + "/transform"), Linear::bind(store, prefix + "/gate")};
}

Tensor Highway::forward(const ParamStore& store, const Tensor& x, Cache* cache) const {
  Tensor h_pre = transform.forward(store, x);
  Tensor t = gate.forward(store, x);
  for (double& v : t.values()) v = sigmoid(v);
  Tensor y(x.shape());
  for (std::size_t i = 0; i < y.size(); ++i) {
    y[i] = t[i] * std::max(h_pre[i], 0.0) + (1.0 - t[i]) * x[i];
  }
  if (cache) *cache = Cache{x, std::move(h_pre), std::move(t)};
  return y;
}

Tensor Highway::backward(ParamStore& store, const Cache& cache, const Tensor& dy) const {
  Tensor dh(dy.shape());
  Tensor dgate(dy.shape());
  Tensor dx(dy.shape());
  for (std::size_t i = 0; i < dy.size(); ++i) {
    const double t = cache.t[i];
    const double h = std::max(cache.h_pre[i], 0.0);
    dh[i] = cache.h_pre[i] > 0.0 ? dy[i] * t : 0.0;
    dgate[i] = dy[i] * (h - cache.x[i]) * t * (1.0 - t);
    dx[i] = dy[i] * (1.0 - t);
  }
  Tensor dx_h = transform.backward(store, cache.x, dh);
  Tensor dx_g = gate.backward(store, cache.x, dgate);
  for (std::size_t i = 0; i < dx.size(); ++i) dx[i] += dx_h[i] + dx_g[i];
  return dx;
}

// --- pooling / dropout / relu ---

MaxPoolResult max_pool_time(const Tensor& states) {
  if (states.rank() != 2) throw ShapeMismatch("max pool expects [T x d]");
  const std::size_t t_len = states.rows();
  const std::size_t d = states.cols();
  MaxPoolResult r{Tensor({d}, -std::numeric_limits<double>::infinity()),
                  std::vector<std::size_t>(d, 0), t_len};
  for (std::size_t t = 0; t < t_len; ++t) {
    auto row = states.row(t);
    for (std::size_t c = 0; c < d; ++c) {
      if (row[c] > r.pooled[c]) {
        r.pooled[c] = row[c];
        r.argmax[c] = t;
      }
    }
  }
  return r;
}

Tensor max_pool_time_backward(const MaxPoolResult& fwd, const Tensor& dy) {
  const std::size_t d = fwd.argmax.size();
  Tensor dx({fwd.rows, d});
  for (std::size_t c = 0; c < d; ++c) dx(fwd.argmax[c], c) = dy[c];
  return dx;
}

Tensor dropout_forward(const Tensor& x, double p, bool train, Rng* rng, DropoutMask* mask) {
  if (!train || p <= 0.0) {
    if (mask) mask->scale.assign(x.size(), 1.0);
    return x;
  }
  if (rng == nullptr) throw UsageError("train-mode dropout needs a random generator");
  if (p >= 1.0) throw UsageError("dropout probability must be below 1");
  const double keep_scale = 1.0 / (1.0 - p);
  std::vector<double> scale(x.size());
  Tensor y(x.shape());
  for (std::size_t i = 0; i < x.size(); ++i) {
    scale[i] = rng->bernoulli(p) ? 0.0 : keep_scale;
    y[i] = x[i] * scale[i];
  }
  if (mask) mask->scale = std::move(scale);
  return y;
}

Tensor dropout_backward(const DropoutMask& mask, const Tensor& dy) {
  Tensor dx(dy.shape());
  for (std::size_t i = 0; i < dy.size(); ++i) dx[i] = dy[i] * mask.scale[i];
  return dx;
}

Tensor relu(const Tensor& x) {
  Tensor y(x.shape());
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = std::max(x[i], 0.0);
  return y;
}

Tensor relu_backward(const Tensor& x, const Tensor& dy) {
  Tensor dx(dy.shape());
  for (std::size_t i = 0; i < dy.size(); ++i) dx[i] = x[i] > 0.0 ? dy[i] : 0.0;
  return dx;
}

// --- FeedForward ---

FeedForward FeedForward::create(ParamStore& store, const std::string& prefix, std::size_t in,
                                std::size_t units, std::size_t classes, Rng& rng,
                                bool trainable) {
  return FeedForward{Linear::create(store, prefix + "/hidden1", in, units, rng, trainable),
                     Linear::create(store, prefix + "/hidden2", units, units, rng, trainable),
                     Linear::create(store, prefix + "/output", units, classes, rng, trainable)};
}

FeedForward FeedForward::bind(const ParamStore& store, const std::string& prefix) {
  return FeedForward{Linear::bind(store, prefix + "/hidden1"),
                     Linear::bind(store, prefix + "/hidden2"),
                     Linear::bind(store, prefix + "/output")};
}

Tensor FeedForward::forward(const ParamStore& store, const Tensor& x, double dropout, bool train,
                            Rng* rng, Cache* cache) const {
  Cache local;
  Cache& c = cache ? *cache : local;
  c.x = x;
  c.a1 = hidden1.forward(store, x);
  c.h1 = dropout_forward(relu(c.a1), dropout, train, rng, &c.drop1);
  c.a2 = hidden2.forward(store, c.h1);
  c.h2 = dropout_forward(relu(c.a2), dropout, train, rng, &c.drop2);
  return output.forward(store, c.h2);
}

Tensor FeedForward::backward(ParamStore& store, const Cache& cache, const Tensor& dlogits) const {
  Tensor dh2 = output.backward(store, cache.h2, dlogits);
  Tensor da2 = relu_backward(cache.a2, dropout_backward(cache.drop2, dh2));
  Tensor dh1 = hidden2.backward(store, cache.h1, da2);
  Tensor da1 = relu_backward(cache.a1, dropout_backward(cache.drop1, dh1));
  return hidden1.backward(store, cache.x, da1);
}

}  // namespace cuenet::nn
