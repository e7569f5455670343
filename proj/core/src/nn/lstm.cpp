#include "cuenet/nn/lstm.hpp"

#include <algorithm>
#include <cmath>

#include "cuenet/error.hpp"
#include "nn/kernels.hpp"

namespace cuenet::nn {

using detail::mat;
using detail::vec;

namespace {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

std::string w_input(const std::string& p) { return p + "/w_input"; }
std::string w_hidden(const std::string& p) { return p + "/w_hidden"; }
std::string bias_name(const std::string& p) { return p + "/bias"; }

}  // namespace

Tensor reverse_rows(const Tensor& x) {
  Tensor out(x.shape());
  const std::size_t t_len = x.rows();
  for (std::size_t t = 0; t < t_len; ++t) {
    std::copy(x.row(t).begin(), x.row(t).end(), out.row(t_len - 1 - t).begin());
  }
  return out;
}

Lstm Lstm::create(ParamStore& store, const std::string& prefix, std::size_t input_size,
                  std::size_t hidden_size, Rng& rng, bool trainable) {
  const double limit = 1.0 / std::sqrt(static_cast<double>(hidden_size));
  auto& wi = store.add(w_input(prefix), {4 * hidden_size, input_size}, trainable);
  for (double& v : wi.value.values()) v = rng.uniform(-limit, limit);
  auto& wh = store.add(w_hidden(prefix), {4 * hidden_size, hidden_size}, trainable);
  for (double& v : wh.value.values()) v = rng.uniform(-limit, limit);
  auto& b = store.add(bias_name(prefix), {4 * hidden_size}, trainable);
  for (std::size_t k = hidden_size; k < 2 * hidden_size; ++k) b.value[k] = 1.0;
  Lstm l;
  l.prefix_ = prefix;
  l.input_size_ = input_size;
  l.hidden_size_ = hidden_size;
  return l;
}

Lstm Lstm::bind(const ParamStore& store, const std::string& prefix) {
  const auto& wi = store.value(w_input(prefix));
  const auto& wh = store.value(w_hidden(prefix));
  const std::size_t h = wh.dim(1);
  if (wi.dim(0) != 4 * h || wh.dim(0) != 4 * h || store.value(bias_name(prefix)).size() != 4 * h) {
    throw ShapeMismatch("inconsistent LSTM parameters under " + prefix);
  }
  Lstm l;
  l.prefix_ = prefix;
  l.input_size_ = wi.dim(1);
  l.hidden_size_ = h;
  return l;
}

Lstm::Output Lstm::forward(const ParamStore& store, const Tensor& x, Cache* cache,
                           const Tensor* h0, const Tensor* c0) const {
  if (x.rank() != 2 || x.cols() != input_size_) {
    throw ShapeMismatch("LSTM " + prefix_ + " expects [T x " + std::to_string(input_size_) +
                        "], got " + shape_string(x.shape()));
  }
  const std::size_t h = hidden_size_;
  const std::size_t t_len = x.rows();
  if (h0) expect_shape(*h0, {h}, "LSTM h0");
  if (c0) expect_shape(*c0, {h}, "LSTM c0");

  const Tensor& wi = store.value(w_input(prefix_));
  const Tensor& wh = store.value(w_hidden(prefix_));
  const Tensor& b = store.value(bias_name(prefix_));

  Tensor gates({t_len, 4 * h});
  auto gm = mat(gates);
  gm.noalias() = mat(x) * mat(wi).transpose();
  gm.rowwise() += vec(b).transpose();

  Tensor cells({t_len, h});
  Tensor hidden({t_len, h});
  Tensor h_prev = h0 ? *h0 : Tensor({h});
  Tensor c_prev = c0 ? *c0 : Tensor({h});
  const auto whm = mat(wh);
  for (std::size_t t = 0; t < t_len; ++t) {
    double* g = gates.row(t).data();
    detail::VectorMap gv(g, static_cast<Eigen::Index>(4 * h));
    gv.noalias() += whm * vec(h_prev);
    double* c = cells.row(t).data();
    double* hh = hidden.row(t).data();
    for (std::size_t k = 0; k < h; ++k) {
      const double ig = sigmoid(g[k]);
      const double fg = sigmoid(g[h + k]);
      const double cg = std::tanh(g[2 * h + k]);
      const double og = sigmoid(g[3 * h + k]);
      g[k] = ig;
      g[h + k] = fg;
      g[2 * h + k] = cg;
      g[3 * h + k] = og;
      c[k] = fg * c_prev[k] + ig * cg;
      hh[k] = og * std::tanh(c[k]);
    }
    std::copy_n(hh, h, h_prev.data());
    std::copy_n(c, h, c_prev.data());
  }

  Output out{hidden, h_prev, c_prev};
  if (cache) {
    cache->x = x;
    cache->gates = std::move(gates);
    cache->cells = std::move(cells);
    cache->hidden = std::move(hidden);
    cache->h0 = h0 ? *h0 : Tensor({h});
    cache->c0 = c0 ? *c0 : Tensor({h});
  }
  return out;
}

Lstm::Gradients Lstm::backward(ParamStore& store, const Cache& cache, const Tensor& d_hidden,
                               const Tensor* dh_final, const Tensor* dc_final) const {
  const std::size_t h = hidden_size_;
  const std::size_t t_len = cache.x.rows();
  expect_shape(d_hidden, {t_len, h}, "LSTM d_hidden");

  auto& wi = store.at(w_input(prefix_));
  auto& wh = store.at(w_hidden(prefix_));
  auto& b = store.at(bias_name(prefix_));

  Tensor dz({t_len, 4 * h});
  Tensor dh_next = dh_final ? *dh_final : Tensor({h});
  Tensor dc_next = dc_final ? *dc_final : Tensor({h});
  const auto whm = mat(wh.value);
  for (std::size_t t = t_len; t-- > 0;) {
    const double* g = cache.gates.row(t).data();
    const double* c = cache.cells.row(t).data();
    const double* c_prev = t > 0 ? cache.cells.row(t - 1).data() : cache.c0.data();
    const double* dh_out = d_hidden.row(t).data();
    double* d = dz.row(t).data();
    for (std::size_t k = 0; k < h; ++k) {
      const double ig = g[k], fg = g[h + k], cg = g[2 * h + k], og = g[3 * h + k];
      const double tc = std::tanh(c[k]);
      const double dh = dh_out[k] + dh_next[k];
      const double dc = dc_next[k] + dh * og * (1.0 - tc * tc);
      d[k] = dc * cg * ig * (1.0 - ig);
      d[h + k] = dc * c_prev[k] * fg * (1.0 - fg);
      d[2 * h + k] = dc * ig * (1.0 - cg * cg);
      d[3 * h + k] = dh * tc * og * (1.0 - og);
      dc_next[k] = dc * fg;
    }
    vec(dh_next).noalias() =
        whm.transpose() * detail::ConstVectorMap(d, static_cast<Eigen::Index>(4 * h));
  }

  // Hidden states feeding each step: h0, h_0 .. h_{T-2}.
  Tensor h_prev({t_len, h});
  std::copy_n(cache.h0.data(), h, h_prev.row(0).data());
  if (t_len > 1) {
    std::copy_n(cache.hidden.data(), (t_len - 1) * h, h_prev.row(1).data());
  }
  mat(wi.grad).noalias() += mat(dz).transpose() * mat(cache.x);
  mat(wh.grad).noalias() += mat(dz).transpose() * mat(h_prev);
  vec(b.grad) += mat(dz).colwise().sum().transpose();

  Gradients out{Tensor(cache.x.shape()), std::move(dh_next), std::move(dc_next)};
  mat(out.dx).noalias() = mat(dz) * mat(wi.value);
  return out;
}

// --- BiLstm ---

BiLstm BiLstm::create(ParamStore& store, const std::string& prefix, std::size_t input_size,
                      std::size_t hidden_size, Rng& rng, bool trainable) {
  BiLstm b;
  b.fwd_ = Lstm::create(store, prefix + "/fwd", input_size, hidden_size, rng, trainable);
  b.bwd_ = Lstm::create(store, prefix + "/bwd", input_size, hidden_size, rng, trainable);
  return b;
}

BiLstm BiLstm::bind(const ParamStore& store, const std::string& prefix) {
  BiLstm b;
  b.fwd_ = Lstm::bind(store, prefix + "/fwd");
  b.bwd_ = Lstm::bind(store, prefix + "/bwd");
  if (b.fwd_.input_size() != b.bwd_.input_size() ||
      b.fwd_.hidden_size() != b.bwd_.hidden_size()) {
    throw ShapeMismatch("BiLSTM directions differ under " + prefix);
  }
  return b;
}

Tensor BiLstm::forward(const ParamStore& store, const Tensor& x, Cache* cache) const {
  const std::size_t h = fwd_.hidden_size();
  auto f = fwd_.forward(store, x, cache ? &cache->fwd : nullptr);
  auto r = bwd_.forward(store, reverse_rows(x), cache ? &cache->bwd : nullptr);
  const std::size_t t_len = x.rows();
  Tensor out({t_len, 2 * h});
  for (std::size_t t = 0; t < t_len; ++t) {
    std::copy_n(f.hidden.row(t).data(), h, out.row(t).data());
    std::copy_n(r.hidden.row(t_len - 1 - t).data(), h, out.row(t).data() + h);
  }
  return out;
}

Tensor BiLstm::backward(ParamStore& store, const Cache& cache, const Tensor& dy) const {
  const std::size_t h = fwd_.hidden_size();
  const std::size_t t_len = dy.rows();
  Tensor df({t_len, h});
  Tensor dr({t_len, h});
  for (std::size_t t = 0; t < t_len; ++t) {
    std::copy_n(dy.row(t).data(), h, df.row(t).data());
    std::copy_n(dy.row(t).data() + h, h, dr.row(t_len - 1 - t).data());
  }
  auto gf = fwd_.backward(store, cache.fwd, df);
  auto gr = bwd_.backward(store, cache.bwd, dr);
  Tensor dx = reverse_rows(gr.dx);
  for (std::size_t i = 0; i < dx.size(); ++i) dx[i] += gf.dx[i];
  return dx;
}

Tensor BiLstm::forward_padded(const ParamStore& store, const Tensor& x,
                              std::span<const std::size_t> lengths, double pad_value) const {
  if (x.rank() != 3 || x.dim(0) != lengths.size()) {
    throw ShapeMismatch("padded BiLSTM expects [B x T x d] with one length per row");
  }
  const std::size_t batch = x.dim(0);
  const std::size_t t_max = x.dim(1);
  const std::size_t d_in = x.dim(2);
  const std::size_t width = output_size();
  Tensor out({batch, t_max, width}, pad_value);
  for (std::size_t b = 0; b < batch; ++b) {
    const std::size_t len = lengths[b];
    if (len == 0 || len > t_max) throw ShapeMismatch("sequence length out of range");
    Tensor row({len, d_in});
    std::copy_n(x.data() + b * t_max * d_in, len * d_in, row.data());
    Tensor y = forward(store, row);
    std::copy_n(y.data(), len * width, out.data() + b * t_max * width);
  }
  return out;
}

}  // namespace cuenet::nn
