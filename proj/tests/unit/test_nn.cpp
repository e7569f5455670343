#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <sstream>

#include "cuenet/error.hpp"
#include "cuenet/nn/adam.hpp"
#include "cuenet/nn/checkpoint.hpp"
#include "cuenet/nn/grad_check.hpp"
#include "cuenet/nn/layers.hpp"
#include "cuenet/nn/loss.hpp"
#include "cuenet/nn/lstm.hpp"
#include "cuenet/nn/param_store.hpp"
#include "cuenet/rng.hpp"

using namespace cuenet;
using namespace cuenet::nn;

namespace {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

void set_values(ParamStore& store, const std::string& name, std::vector<double> values) {
  auto& t = store.value(name);
  ASSERT_EQ(t.size(), values.size()) << name;
  for (std::size_t i = 0; i < values.size(); ++i) t[i] = values[i];
}

void zero_all(ParamStore& store) {
  for (auto& p : store.entries()) p.value.fill(0.0);
}

Tensor random_matrix(std::size_t rows, std::size_t cols, Rng& rng) {
  Tensor t({rows, cols});
  for (double& v : t.values()) v = rng.uniform(-1.0, 1.0);
  return t;
}

// Weighted sum of every element, so each output position gets a distinct
// upstream gradient in the checks below.
double weighted_sum(const Tensor& y, Tensor* dy) {
  double total = 0.0;
  if (dy != nullptr) *dy = Tensor(y.shape());
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double w = 0.3 + 0.1 * static_cast<double>(i % 7);
    total += w * y[i];
    if (dy != nullptr) (*dy)[i] = w;
  }
  return total;
}

}  // namespace

// --- LSTM ---

TEST(Lstm, ParameterNamesAndShapes) {
  ParamStore store;
  Rng rng(1);
  Lstm::create(store, "enc/l0", 3, 2, rng);
  EXPECT_EQ(store.value("enc/l0/w_input").shape(), (Shape{8, 3}));
  EXPECT_EQ(store.value("enc/l0/w_hidden").shape(), (Shape{8, 2}));
  const auto& b = store.value("enc/l0/bias");
  EXPECT_EQ(b.shape(), (Shape{8}));
  // Forget-gate slice starts at one, the rest at zero.
  EXPECT_EQ(b.values()[0], 0.0);
  EXPECT_EQ(b.values()[2], 1.0);
  EXPECT_EQ(b.values()[3], 1.0);
  EXPECT_EQ(b.values()[4], 0.0);
}

TEST(Lstm, ZeroWeightsGiveZeroOutput) {
  ParamStore store;
  Rng rng(2);
  const auto lstm = Lstm::create(store, "l", 4, 3, rng);
  zero_all(store);
  const auto out = lstm.forward(store, random_matrix(5, 4, rng));
  for (double v : out.hidden.values()) EXPECT_EQ(v, 0.0);
}

TEST(Lstm, SingleStepMatchesHandComputation) {
  ParamStore store;
  Rng rng(3);
  const auto lstm = Lstm::create(store, "l", 1, 1, rng);
  set_values(store, "l/w_input", {0.5, -0.5, 1.0, 0.2});
  set_values(store, "l/w_hidden", {0.0, 0.0, 0.0, 0.0});
  set_values(store, "l/bias", {0.0, 1.0, 0.0, 0.0});
  const auto out = lstm.forward(store, Tensor::matrix(1, 1, {2.0}));
  // z = [1, 0, 2, 0.4]; c = sigmoid(1) tanh(2); h = sigmoid(0.4) tanh(c).
  const double c = sigmoid(1.0) * std::tanh(2.0);
  const double h = sigmoid(0.4) * std::tanh(c);
  EXPECT_NEAR(out.c_final[0], c, 1e-12);
  EXPECT_NEAR(out.h_final[0], h, 1e-12);
  EXPECT_NEAR(out.hidden(0, 0), h, 1e-12);
}

TEST(Lstm, SequenceEqualsChainedSingleSteps) {
  ParamStore store;
  Rng rng(4);
  const auto lstm = Lstm::create(store, "l", 3, 4, rng);
  const Tensor x = random_matrix(3, 3, rng);
  const auto full = lstm.forward(store, x);

  Tensor h({4});
  Tensor c({4});
  for (std::size_t t = 0; t < 3; ++t) {
    const Tensor xt = Tensor::matrix(1, 3, {x(t, 0), x(t, 1), x(t, 2)});
    const auto step = lstm.forward(store, xt, nullptr, &h, &c);
    h = step.h_final;
    c = step.c_final;
    for (std::size_t j = 0; j < 4; ++j) EXPECT_NEAR(full.hidden(t, j), h[j], 1e-12);
  }
  for (std::size_t j = 0; j < 4; ++j) EXPECT_NEAR(full.c_final[j], c[j], 1e-12);
}

TEST(Lstm, RejectsWrongInputWidth) {
  ParamStore store;
  Rng rng(5);
  const auto lstm = Lstm::create(store, "l", 3, 2, rng);
  EXPECT_THROW(lstm.forward(store, Tensor({2, 4})), ShapeMismatch);
}

TEST(BiLstm, WidthAndDirectionSymmetry) {
  ParamStore store;
  Rng rng(6);
  const auto bi = BiLstm::create(store, "bi", 2, 3, rng);
  // Same weights in both directions: the backward half on x must equal the
  // forward half on reversed x, reversed in time.
  store.value("bi/bwd/w_input") = store.value("bi/fwd/w_input");
  store.value("bi/bwd/w_hidden") = store.value("bi/fwd/w_hidden");
  store.value("bi/bwd/bias") = store.value("bi/fwd/bias");

  const Tensor x = random_matrix(4, 2, rng);
  const Tensor y = bi.forward(store, x);
  const Tensor yr = bi.forward(store, reverse_rows(x));
  ASSERT_EQ(y.shape(), (Shape{4, 6}));
  for (std::size_t t = 0; t < 4; ++t) {
    for (std::size_t j = 0; j < 3; ++j) {
      EXPECT_NEAR(y(t, 3 + j), yr(3 - t, j), 1e-12);
      EXPECT_NEAR(y(t, j), yr(3 - t, 3 + j), 1e-12);
    }
  }
}

TEST(BiLstm, PaddedBatchMatchesPerRowForward) {
  ParamStore store;
  Rng rng(7);
  const auto bi = BiLstm::create(store, "bi", 2, 2, rng);
  const Tensor a = random_matrix(3, 2, rng);
  const Tensor b = random_matrix(1, 2, rng);
  Tensor batch({2, 3, 2});
  for (std::size_t i = 0; i < 6; ++i) batch[i] = a[i];
  for (std::size_t i = 0; i < 2; ++i) batch[6 + i] = b[i];
  for (std::size_t i = 8; i < 12; ++i) batch[i] = 99.0;  // garbage in the pad
  const std::vector<std::size_t> lengths = {3, 1};
  const double pad = -std::numeric_limits<double>::infinity();
  const Tensor y = bi.forward_padded(store, batch, lengths, pad);
  ASSERT_EQ(y.shape(), (Shape{2, 3, 4}));
  const Tensor ya = bi.forward(store, a);
  const Tensor yb = bi.forward(store, b);
  for (std::size_t i = 0; i < 12; ++i) EXPECT_NEAR(y[i], ya[i], 1e-12);
  for (std::size_t i = 0; i < 4; ++i) EXPECT_NEAR(y[12 + i], yb[i], 1e-12);
  for (std::size_t i = 16; i < 24; ++i) EXPECT_EQ(y[i], pad);
}

// --- Character CNN, highway, pooling ---

TEST(CharConv, AllOnesFilter) {
  ParamStore store;
  Rng rng(8);
  const auto conv = CharConv::create(store, "c", 2, 1, 1, rng);
  set_values(store, "c/weight", {1.0, 1.0});
  set_values(store, "c/bias", {0.0});
  // Windows [1,2] and [2,1] both sum to 3.
  const Tensor y = conv.forward(store, Tensor::matrix(3, 1, {1.0, 2.0, 1.0}));
  ASSERT_EQ(y.shape(), (Shape{1}));
  EXPECT_NEAR(y[0], std::tanh(3.0), 1e-12);
}

TEST(CharConv, ShortInputIsZeroPadded) {
  ParamStore store;
  Rng rng(9);
  const auto conv = CharConv::create(store, "c", 3, 1, 1, rng);
  set_values(store, "c/weight", {1.0, 1.0, 1.0});
  set_values(store, "c/bias", {0.0});
  EXPECT_NEAR(conv.forward(store, Tensor::matrix(1, 1, {0.5}))[0], std::tanh(0.5), 1e-12);
}

TEST(CharConv, OutputWidthIsFilterCountForAnyLength) {
  ParamStore store;
  Rng rng(10);
  const auto conv = CharConv::create(store, "c", 3, 25, 4, rng);
  for (std::size_t len : {1u, 3u, 17u}) {
    EXPECT_EQ(conv.forward(store, random_matrix(len, 4, rng)).shape(), (Shape{25}));
  }
}

TEST(MaxPool, ColumnwiseMaximum) {
  const auto r = max_pool_time(Tensor::matrix(3, 2, {1, 3, 2, 0, 0, 5}));
  EXPECT_EQ(r.pooled, Tensor::vector({2, 5}));
  EXPECT_EQ(r.argmax, (std::vector<std::size_t>{1, 2}));
  const Tensor dx = max_pool_time_backward(r, Tensor::vector({10, 20}));
  EXPECT_EQ(dx, Tensor::matrix(3, 2, {0, 0, 10, 0, 0, 20}));
}

TEST(MaxPool, NegativeInfinityPaddingNeverWins) {
  const double ninf = -std::numeric_limits<double>::infinity();
  const auto r = max_pool_time(Tensor::matrix(2, 2, {-3, ninf, ninf, -7}));
  EXPECT_EQ(r.pooled, Tensor::vector({-3, -7}));
}

TEST(Highway, ClosedGateCopiesInput) {
  ParamStore store;
  Rng rng(11);
  const auto hw = Highway::create(store, "h", 2, rng);
  store.value("h/gate/weight").fill(0.0);
  store.value("h/gate/bias").fill(-1e3);
  const Tensor x = Tensor::vector({0.25, -4.0});
  const Tensor y = hw.forward(store, x);
  EXPECT_NEAR(y[0], 0.25, 1e-12);
  EXPECT_NEAR(y[1], -4.0, 1e-12);
}

TEST(Dropout, InferenceIsIdentityAndTrainingRescales) {
  Rng rng(12);
  const Tensor x = Tensor::vector(std::vector<double>(1000, 1.0));
  EXPECT_EQ(dropout_forward(x, 0.5, false, &rng, nullptr), x);
  DropoutMask mask;
  const Tensor y = dropout_forward(x, 0.5, true, &rng, &mask);
  std::size_t kept = 0;
  for (double v : y.values()) {
    EXPECT_TRUE(v == 0.0 || v == 2.0);
    kept += v == 2.0 ? 1 : 0;
  }
  EXPECT_GT(kept, 400u);
  EXPECT_LT(kept, 600u);
  EXPECT_EQ(dropout_backward(mask, x), y);
}

TEST(Relu, GradientIsZeroAtZero) {
  const Tensor x = Tensor::vector({-1.0, 0.0, 2.0});
  EXPECT_EQ(relu(x), Tensor::vector({0.0, 0.0, 2.0}));
  EXPECT_EQ(relu_backward(x, Tensor::vector({5, 5, 5})), Tensor::vector({0, 0, 5}));
}

// --- Feed-forward head ---

TEST(FeedForward, ZeroWeightsGiveZeroLogits) {
  ParamStore store;
  Rng rng(13);
  const auto ffn = FeedForward::create(store, "f", 6, 4, 2, rng);
  zero_all(store);
  const Tensor y = ffn.forward(store, random_matrix(1, 6, rng).reshaped({6}), 0.5, false, nullptr);
  EXPECT_EQ(y, Tensor::vector({0.0, 0.0}));
}

TEST(FeedForward, HandComputedScalarNetwork) {
  ParamStore store;
  Rng rng(14);
  const auto ffn = FeedForward::create(store, "f", 1, 1, 2, rng);
  set_values(store, "f/hidden1/weight", {2.0});
  set_values(store, "f/hidden1/bias", {0.0});
  set_values(store, "f/hidden2/weight", {3.0});
  set_values(store, "f/hidden2/bias", {-1.0});
  set_values(store, "f/output/weight", {1.0, -1.0});
  set_values(store, "f/output/bias", {0.5, 0.0});
  // x = 1: relu(2) = 2, relu(6 - 1) = 5, logits [5.5, -5].
  EXPECT_EQ(ffn.forward(store, Tensor::vector({1.0}), 0.0, false, nullptr),
            Tensor::vector({5.5, -5.0}));
  // x = -1: both hidden layers clip to zero, leaving the output bias.
  EXPECT_EQ(ffn.forward(store, Tensor::vector({-1.0}), 0.0, false, nullptr),
            Tensor::vector({0.5, 0.0}));
}

// --- Loss ---

TEST(CrossEntropy, Examples) {
  EXPECT_NEAR(cross_entropy(Tensor::vector({0, 0}), 0), std::log(2.0), 1e-12);
  const double big = cross_entropy(Tensor::vector({1000, 0}), 0);
  EXPECT_TRUE(std::isfinite(big));
  EXPECT_NEAR(big, 0.0, 1e-12);
  EXPECT_NEAR(cross_entropy(Tensor::vector({0, 1000}), 0), 1000.0, 1e-9);
  // -log(e^a / (e^a + e^b)) = log(1 + e^(b - a)) at a = 1, b = 2.
  EXPECT_NEAR(cross_entropy(Tensor::vector({1, 2}), 0), std::log1p(std::exp(1.0)), 1e-12);
}

TEST(CrossEntropy, GradientIsSoftmaxMinusOneHot) {
  Tensor d;
  cross_entropy(Tensor::vector({1, 2, 0.5}), 1, &d);
  const double z = std::exp(1.0) + std::exp(2.0) + std::exp(0.5);
  EXPECT_NEAR(d[0], std::exp(1.0) / z, 1e-12);
  EXPECT_NEAR(d[1], std::exp(2.0) / z - 1.0, 1e-12);
  EXPECT_NEAR(d[2], std::exp(0.5) / z, 1e-12);
  const Tensor p = softmax(Tensor::vector({1, 2, 0.5}));
  EXPECT_NEAR(p[0] + p[1] + p[2], 1.0, 1e-15);
}

// --- Adam ---

TEST(Adam, FirstStepMovesByLearningRateTimesSign) {
  ParamStore store;
  store.add("w", {2});
  store.grad("w")[0] = 0.005;
  store.grad("w")[1] = -3.0;
  AdamState adam(1e-3);
  adam_step(store, adam);
  // Bias correction makes m_hat = g and v_hat = g^2 on the first step, so
  // the move is lr * g / (|g| + eps).
  EXPECT_NEAR(store.value("w")[0], -0.000999998, 1e-11);
  EXPECT_NEAR(store.value("w")[1], 1e-3 * 3.0 / (3.0 + 1e-8), 1e-15);
  EXPECT_EQ(adam.step(), 1u);
  EXPECT_EQ(store.grad("w"), Tensor({2}));
}

TEST(Adam, ZeroGradientLeavesValueAlone) {
  ParamStore store;
  store.add("w", {3}).value.fill(0.7);
  AdamState adam(0.1);
  adam_step(store, adam);
  for (double v : store.value("w").values()) EXPECT_EQ(v, 0.7);
}

TEST(Adam, FrozenEntriesAreUntouched) {
  ParamStore store;
  store.add("frozen", {2}, false).value.fill(1.0);
  store.add("live", {1});
  store.grad("frozen").fill(5.0);
  store.grad("live").fill(1.0);
  AdamState adam(0.01);
  adam_step(store, adam);
  EXPECT_EQ(store.value("frozen"), Tensor({2}, 1.0));
  EXPECT_NE(store.value("live")[0], 0.0);
  EXPECT_EQ(adam.moments().count("frozen"), 0u);
}

TEST(Adam, NonFiniteGradientThrowsBeforeAnyUpdate) {
  ParamStore store;
  store.add("a", {1});
  store.add("b", {1});
  store.grad("a")[0] = 1.0;
  store.grad("b")[0] = std::numeric_limits<double>::quiet_NaN();
  AdamState adam(0.01);
  EXPECT_THROW(adam_step(store, adam), NonFiniteGradient);
  EXPECT_EQ(store.value("a")[0], 0.0);
  EXPECT_EQ(adam.step(), 0u);
}

// --- Gradient checks ---

TEST(GradCheck, QuadraticAndDeliberatelyWrongGradient) {
  ParamStore store;
  store.add("theta", {3});
  set_values(store, "theta", {0.5, -1.5, 2.0});
  const LossFunction right = [](ParamStore& s, bool with_grad) {
    double loss = 0.0;
    auto& p = s.at("theta");
    for (std::size_t i = 0; i < 3; ++i) {
      loss += p.value[i] * p.value[i];
      if (with_grad) p.grad[i] += 2.0 * p.value[i];
    }
    return loss;
  };
  const auto good = grad_check(right, store);
  EXPECT_EQ(good.checked, 3u);
  EXPECT_LT(good.max_relative_error, 1e-7);

  const LossFunction wrong = [](ParamStore& s, bool with_grad) {
    double loss = 0.0;
    auto& p = s.at("theta");
    for (std::size_t i = 0; i < 3; ++i) {
      loss += p.value[i] * p.value[i];
      if (with_grad) p.grad[i] += 3.0 * p.value[i];
    }
    return loss;
  };
  EXPECT_GT(grad_check(wrong, store).max_relative_error, 0.3);
  EXPECT_EQ(store.value("theta"), Tensor::vector({0.5, -1.5, 2.0}));
}

TEST(GradCheck, LstmBackpropagationThroughTime) {
  ParamStore store;
  Rng rng(20);
  const auto lstm = Lstm::create(store, "l", 3, 4, rng);
  const Tensor x = random_matrix(5, 3, rng);
  const Tensor h0 = Tensor::vector({0.1, -0.2, 0.3, 0.0});
  const Tensor c0 = Tensor::vector({-0.5, 0.2, 0.0, 0.1});
  const LossFunction loss = [&](ParamStore& s, bool with_grad) {
    Lstm::Cache cache;
    const auto out = lstm.forward(s, x, &cache, &h0, &c0);
    Tensor dh;
    double value = weighted_sum(out.hidden, &dh);
    Tensor dc_final;
    value += 0.7 * weighted_sum(out.c_final, &dc_final);
    for (double& v : dc_final.values()) v *= 0.7;
    if (with_grad) lstm.backward(s, cache, dh, nullptr, &dc_final);
    return value;
  };
  const auto r = grad_check(loss, store, {.coordinates = 1000});
  EXPECT_EQ(r.checked + r.skipped, store.scalar_count());
  EXPECT_LT(r.max_relative_error, 1e-5) << r.worst_parameter << "[" << r.worst_index << "]";
}

TEST(GradCheck, BiLstmInputGradient) {
  // Treat the input as a parameter so dx is checked too.
  ParamStore store;
  Rng rng(21);
  const auto bi = BiLstm::create(store, "bi", 2, 3, rng);
  auto& input = store.add("input", {4, 2});
  for (double& v : input.value.values()) v = rng.uniform(-1.0, 1.0);
  const LossFunction loss = [&](ParamStore& s, bool with_grad) {
    BiLstm::Cache cache;
    const Tensor y = bi.forward(s, s.value("input"), &cache);
    Tensor dy;
    const double value = weighted_sum(y, &dy);
    if (with_grad) {
      const Tensor dx = bi.backward(s, cache, dy);
      auto& g = s.grad("input");
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += dx[i];
    }
    return value;
  };
  const auto r = grad_check(loss, store, {.coordinates = 1000});
  EXPECT_LT(r.max_relative_error, 1e-5) << r.worst_parameter;
}

TEST(GradCheck, CharConvHighwayAndHead) {
  ParamStore store;
  Rng rng(22);
  const auto conv = CharConv::create(store, "conv", 2, 3, 2, rng);
  const auto hw = Highway::create(store, "hw", 3, rng);
  const auto ffn = FeedForward::create(store, "ffn", 3, 4, 2, rng);
  const Tensor chars = random_matrix(5, 2, rng);
  const LossFunction loss = [&](ParamStore& s, bool with_grad) {
    CharConv::Cache cc;
    Highway::Cache hc;
    FeedForward::Cache fc;
    const Tensor a = conv.forward(s, chars, &cc);
    const Tensor b = hw.forward(s, a, &hc);
    const Tensor logits = ffn.forward(s, b, 0.0, false, nullptr, &fc);
    Tensor dlogits;
    const double value = cross_entropy(logits, 1, &dlogits);
    if (with_grad) conv.backward(s, cc, hw.backward(s, hc, ffn.backward(s, fc, dlogits)));
    return value;
  };
  const auto r = grad_check(loss, store, {.coordinates = 1000});
  EXPECT_GT(r.checked, 0u);
  EXPECT_LT(r.max_relative_error, 1e-5) << r.worst_parameter << "[" << r.worst_index << "]";
}

// --- Checkpoints ---

namespace {

ParamStore sample_store() {
  ParamStore store;
  Rng rng(30);
  Linear::create(store, "a", 3, 2, rng);
  Lstm::create(store, "b", 2, 2, rng, false);
  store.round_to_float32();
  return store;
}

std::string to_bytes(const ParamStore& store, std::string_view meta = "{}") {
  std::ostringstream out;
  write_checkpoint(out, store, meta);
  return out.str();
}

}  // namespace

TEST(Checkpoint, HeaderLayout) {
  const std::string bytes = to_bytes(sample_store());
  ASSERT_GE(bytes.size(), 24u);
  EXPECT_EQ(bytes.substr(0, 8), "CUENETCK");
  EXPECT_EQ(static_cast<unsigned char>(bytes[8]), 1u);
  std::uint64_t manifest_len = 0;
  for (int i = 7; i >= 0; --i) {
    manifest_len = (manifest_len << 8) | static_cast<unsigned char>(bytes[16 + i]);
  }
  // Payload is 4 bytes per scalar after the manifest.
  EXPECT_EQ(bytes.size(), 24 + manifest_len + 4 * sample_store().scalar_count());
}

TEST(Checkpoint, RoundTripIsByteIdentical) {
  const ParamStore store = sample_store();
  const std::string bytes = to_bytes(store, R"({"kind":"test"})");
  std::istringstream in(bytes);
  const Checkpoint ckpt = read_checkpoint(in);
  EXPECT_EQ(ckpt.metadata_json, R"({"kind":"test"})");
  ASSERT_EQ(ckpt.store.size(), store.size());
  for (std::size_t i = 0; i < store.size(); ++i) {
    EXPECT_EQ(ckpt.store.entries()[i].name, store.entries()[i].name);
    EXPECT_EQ(ckpt.store.entries()[i].value, store.entries()[i].value);
    EXPECT_EQ(ckpt.store.entries()[i].trainable, store.entries()[i].trainable);
  }
  EXPECT_EQ(to_bytes(ckpt.store, ckpt.metadata_json), bytes);

  ParamStore target;
  Rng rng(99);
  Linear::create(target, "a", 3, 2, rng);
  Lstm::create(target, "b", 2, 2, rng);
  restore_into(target, ckpt);
  EXPECT_EQ(target.value("a/weight"), store.value("a/weight"));
  EXPECT_EQ(target.value("b/w_hidden"), store.value("b/w_hidden"));

  // With a prefix, target entry "w" is read from checkpoint entry "b/w".
  ParamStore sub;
  Lstm::create(sub, "", 2, 2, rng);
  EXPECT_THROW(restore_into(sub, ckpt, "a"), ShapeManifestMismatch);
  restore_into(sub, ckpt, "b");
  EXPECT_EQ(sub.value("/w_input"), store.value("b/w_input"));
}

TEST(Checkpoint, CorruptInputsAreRejected) {
  const std::string bytes = to_bytes(sample_store());
  auto read = [](std::string b) {
    std::istringstream in(b);
    return read_checkpoint(in);
  };
  EXPECT_THROW(read(bytes.substr(0, bytes.size() - 1)), CorruptCheckpoint);
  EXPECT_THROW(read(bytes + "x"), CorruptCheckpoint);
  EXPECT_THROW(read(bytes.substr(0, 10)), CorruptCheckpoint);
  std::string bad_magic = bytes;
  bad_magic[0] = 'X';
  EXPECT_THROW(read(bad_magic), CorruptCheckpoint);
  std::string bad_version = bytes;
  bad_version[8] = 2;
  EXPECT_THROW(read(bad_version), CorruptCheckpoint);
  std::string bad_manifest = bytes;
  bad_manifest[24] = '[';
  EXPECT_THROW(read(bad_manifest), CorruptCheckpoint);
}

TEST(Checkpoint, ShapeMismatchOnRestore) {
  std::istringstream in(to_bytes(sample_store()));
  const Checkpoint ckpt = read_checkpoint(in);
  Rng rng(1);

  ParamStore wrong_shape;
  Linear::create(wrong_shape, "a", 4, 2, rng);
  Lstm::create(wrong_shape, "b", 2, 2, rng);
  EXPECT_THROW(restore_into(wrong_shape, ckpt), ShapeManifestMismatch);

  ParamStore missing_entry;
  Linear::create(missing_entry, "a", 3, 2, rng);
  Lstm::create(missing_entry, "b", 2, 2, rng);
  missing_entry.add("extra", {1});
  EXPECT_THROW(restore_into(missing_entry, ckpt), ShapeManifestMismatch);

  ParamStore fewer;
  Linear::create(fewer, "a", 3, 2, rng);
  EXPECT_THROW(restore_into(fewer, ckpt), ShapeManifestMismatch);
}

TEST(ParamStore, DuplicateNamesAndUnknownLookups) {
  ParamStore store;
  store.add("x", {2});
  EXPECT_THROW(store.add("x", {2}), Error);
  EXPECT_THROW(store.at("nope"), Error);
  store.grad("x")[0] = 3.0;
  store.grad("x")[1] = 4.0;
  EXPECT_DOUBLE_EQ(store.grad_norm(), 5.0);
  store.scale_grads(0.5);
  EXPECT_DOUBLE_EQ(store.grad_norm(), 2.5);
}
