#include "cuenet/encoder/encoder.hpp"

#include <algorithm>
#include <cmath>

#include "cuenet/error.hpp"

namespace cuenet::encoder {

using nn::Tensor;

namespace {

std::string conv_prefix(std::size_t width) { return "char_cnn/w" + std::to_string(width); }
std::string highway_prefix(std::size_t k) { return "highway/" + std::to_string(k); }
std::string lstm_prefix(const char* dir, std::size_t k) {
  return std::string("bilm/") + dir + "/" + std::to_string(k);
}

// [T x a] and [T x b] -> [T x (a+b)].
Tensor concat_cols(const Tensor& a, const Tensor& b) {
  const std::size_t t = a.rows();
  Tensor out({t, a.cols() + b.cols()});
  for (std::size_t r = 0; r < t; ++r) {
    std::copy(a.row(r).begin(), a.row(r).end(), out.row(r).begin());
    std::copy(b.row(r).begin(), b.row(r).end(), out.row(r).begin() + a.cols());
  }
  return out;
}

Tensor slice_cols(const Tensor& x, std::size_t begin, std::size_t width) {
  Tensor out({x.rows(), width});
  for (std::size_t r = 0; r < x.rows(); ++r) {
    auto src = x.row(r).subspan(begin, width);
    std::copy(src.begin(), src.end(), out.row(r).begin());
  }
  return out;
}

}  // namespace

// ---------------------------------------------------------------- ScalarMix

ScalarMix ScalarMix::create(nn::ParamStore& store, const std::string& prefix,
                            std::size_t inputs) {
  if (inputs == 0) throw UsageError("scalar mix needs at least one input");
  ScalarMix m{prefix + "/weights", prefix + "/gamma", inputs};
  store.add(m.weights, {inputs});
  store.add(m.gamma, {1}).value[0] = 1.0;
  return m;
}

ScalarMix ScalarMix::bind(const nn::ParamStore& store, const std::string& prefix) {
  ScalarMix m{prefix + "/weights", prefix + "/gamma", 0};
  m.inputs = store.value(m.weights).size();
  expect_shape(store.value(m.gamma), {1}, "scalar mix gamma");
  return m;
}

Tensor ScalarMix::forward(const nn::ParamStore& store, std::span<const Tensor> xs,
                          Cache* cache) const {
  if (xs.size() != inputs) {
    throw ShapeMismatch("scalar mix expects " + std::to_string(inputs) + " inputs, got " +
                        std::to_string(xs.size()));
  }
  const Tensor s = nn::softmax(store.value(weights));
  Tensor mixed(xs[0].shape());
  for (std::size_t j = 0; j < inputs; ++j) {
    expect_shape(xs[j], xs[0].shape(), "scalar mix input");
    for (std::size_t i = 0; i < mixed.size(); ++i) mixed[i] += s[j] * xs[j][i];
  }
  const double g = store.value(gamma)[0];
  Tensor y(mixed.shape());
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = g * mixed[i];
  if (cache) {
    cache->s.assign(s.values().begin(), s.values().end());
    cache->mixed = std::move(mixed);
  }
  return y;
}

void ScalarMix::backward(nn::ParamStore& store, std::span<const Tensor> xs, const Cache& cache,
                         const Tensor& dy) const {
  const double g = store.value(gamma)[0];
  double dgamma = 0.0;
  for (std::size_t i = 0; i < dy.size(); ++i) dgamma += dy[i] * cache.mixed[i];
  store.grad(gamma)[0] += dgamma;

  std::vector<double> ds(inputs, 0.0);
  for (std::size_t j = 0; j < inputs; ++j) {
    double acc = 0.0;
    for (std::size_t i = 0; i < dy.size(); ++i) acc += dy[i] * xs[j][i];
    ds[j] = g * acc;
  }
  double weighted = 0.0;
  for (std::size_t j = 0; j < inputs; ++j) weighted += cache.s[j] * ds[j];
  Tensor& dw = store.grad(weights);
  for (std::size_t k = 0; k < inputs; ++k) dw[k] += cache.s[k] * (ds[k] - weighted);
}

// ------------------------------------------------------------- EncoderModel

EncoderModel::EncoderModel(EncoderConfig config, CharVocab chars, WordVocab words)
    : config_(std::move(config)), chars_(std::move(chars)), words_(std::move(words)) {
  config_.validate();
}

EncoderModel::EncoderModel(EncoderConfig config, CharVocab chars, WordVocab words,
                           std::uint64_t seed)
    : EncoderModel(std::move(config), std::move(chars), std::move(words)) {
  Rng rng(seed);
  nn::Embedding::create(params_, "char_embed", chars_.size(), config_.d_char, rng);
  // Padding stays a zero row.
  for (std::size_t c = 0; c < config_.d_char; ++c) params_.value("char_embed")(0, c) = 0.0;
  for (const auto& f : config_.filters) {
    nn::CharConv::create(params_, conv_prefix(f.width), f.width, f.count, config_.d_char, rng);
  }
  const std::size_t total = config_.filter_total();
  for (std::size_t k = 0; k < config_.highway_layers; ++k) {
    nn::Highway::create(params_, highway_prefix(k), total, rng);
  }
  nn::Linear::create(params_, "projection", total, config_.d_word, rng);
  for (std::size_t k = 0; k < config_.n_layers; ++k) {
    const std::size_t in = k == 0 ? config_.d_word : config_.d_lm;
    nn::Lstm::create(params_, lstm_prefix("fwd", k), in, config_.d_lm, rng);
    nn::Lstm::create(params_, lstm_prefix("bwd", k), in, config_.d_lm, rng);
  }
  // A zero softmax predicts uniformly, so an untrained LM has perplexity V.
  params_.add("lm/softmax/weight", {words_.size(), config_.d_lm});
  params_.add("lm/softmax/bias", {words_.size()});
  bind_layers();
}

EncoderModel EncoderModel::from_parts(EncoderConfig config, CharVocab chars, WordVocab words,
                                      nn::ParamStore params) {
  EncoderModel reference(config, chars, words, 0);
  for (const auto& p : reference.params_.entries()) {
    if (!params.contains(p.name)) throw ShapeMismatch("encoder parameter '" + p.name + "' missing");
    if (params.value(p.name).shape() != p.value.shape()) {
      throw ShapeMismatch("encoder parameter '" + p.name + "' is " +
                          nn::shape_string(params.value(p.name).shape()) + ", expected " +
                          nn::shape_string(p.value.shape()));
    }
  }
  if (params.size() != reference.params_.size()) {
    throw ShapeMismatch("encoder has " + std::to_string(params.size()) + " parameters, expected " +
                        std::to_string(reference.params_.size()));
  }
  EncoderModel m(std::move(config), std::move(chars), std::move(words));
  m.params_ = std::move(params);
  m.bind_layers();
  return m;
}

void EncoderModel::bind_layers() {
  char_embed_ = nn::Embedding::bind(params_, "char_embed");
  convs_.clear();
  for (const auto& f : config_.filters) {
    convs_.push_back(nn::CharConv::bind(params_, conv_prefix(f.width), f.width, config_.d_char));
  }
  highways_.clear();
  for (std::size_t k = 0; k < config_.highway_layers; ++k) {
    highways_.push_back(nn::Highway::bind(params_, highway_prefix(k)));
  }
  projection_ = nn::Linear::bind(params_, "projection");
  fwd_.clear();
  bwd_.clear();
  for (std::size_t k = 0; k < config_.n_layers; ++k) {
    fwd_.push_back(nn::Lstm::bind(params_, lstm_prefix("fwd", k)));
    bwd_.push_back(nn::Lstm::bind(params_, lstm_prefix("bwd", k)));
  }
  softmax_ = nn::Linear::bind(params_, "lm/softmax");
}

void EncoderModel::freeze() { params_.set_trainable(false); }

bool EncoderModel::frozen() const {
  return std::none_of(params_.entries().begin(), params_.entries().end(),
                      [](const nn::Parameter& p) { return p.trainable; });
}

Tensor EncoderModel::encode_ids(const std::vector<std::vector<std::size_t>>& ids,
                                ForwardCache* cache) const {
  const std::size_t t_len = ids.size();
  Tensor features({t_len, config_.filter_total()});
  if (cache) cache->conv.assign(t_len, std::vector<nn::CharConv::Cache>(convs_.size()));
  for (std::size_t w = 0; w < t_len; ++w) {
    const Tensor emb = char_embed_.forward(params_, ids[w]);
    std::size_t col = 0;
    for (std::size_t g = 0; g < convs_.size(); ++g) {
      const Tensor out = convs_[g].forward(params_, emb, cache ? &cache->conv[w][g] : nullptr);
      std::copy(out.values().begin(), out.values().end(), features.row(w).begin() + col);
      col += convs_[g].count;
    }
  }
  if (cache) cache->highway.assign(highways_.size(), {});
  for (std::size_t k = 0; k < highways_.size(); ++k) {
    features = highways_[k].forward(params_, features, cache ? &cache->highway[k] : nullptr);
  }
  if (cache) cache->projected_input = features;
  return projection_.forward(params_, features);
}

Tensor EncoderModel::encode_word(std::string_view word) const {
  if (word.empty()) throw UsageError("cannot encode an empty word");
  const Tensor words = encode_ids({chars_.encode(word, config_.max_word_chars)}, nullptr);
  return words.reshaped({config_.d_word});
}

Tensor EncoderModel::encode_words(std::span<const text::Token> sentence) const {
  if (sentence.empty()) throw UsageError("cannot encode an empty sentence");
  std::vector<std::vector<std::size_t>> ids;
  ids.reserve(sentence.size());
  for (const auto& tok : sentence) {
    if (tok.surface.empty()) throw UsageError("cannot encode an empty token");
    ids.push_back(chars_.encode(tok.surface, config_.max_word_chars));
  }
  return encode_ids(ids, nullptr);
}

LayerOutputs EncoderModel::forward(std::span<const text::Token> sentence, bool train,
                                   Rng* rng, ForwardCache* cache) const {
  if (sentence.empty()) throw UsageError("cannot encode an empty sentence");
  std::vector<std::vector<std::size_t>> ids;
  ids.reserve(sentence.size());
  for (const auto& tok : sentence) {
    if (tok.surface.empty()) throw UsageError("cannot encode an empty token");
    ids.push_back(chars_.encode(tok.surface, config_.max_word_chars));
  }
  LayerOutputs out;
  out.words = encode_ids(ids, cache);
  if (cache) {
    cache->char_ids = std::move(ids);
    cache->fwd.assign(fwd_.size(), {});
    cache->bwd.assign(bwd_.size(), {});
    cache->fwd_drop.assign(fwd_.size(), {});
    cache->bwd_drop.assign(bwd_.size(), {});
  }
  const double p = config_.lm_dropout;
  Tensor x_f = out.words;
  Tensor x_b = nn::reverse_rows(out.words);
  for (std::size_t k = 0; k < fwd_.size(); ++k) {
    const Tensor in_f = nn::dropout_forward(x_f, p, train, rng, cache ? &cache->fwd_drop[k] : nullptr);
    const Tensor in_b = nn::dropout_forward(x_b, p, train, rng, cache ? &cache->bwd_drop[k] : nullptr);
    x_f = fwd_[k].forward(params_, in_f, cache ? &cache->fwd[k] : nullptr).hidden;
    x_b = bwd_[k].forward(params_, in_b, cache ? &cache->bwd[k] : nullptr).hidden;
    out.layers.push_back(concat_cols(x_f, nn::reverse_rows(x_b)));
  }
  return out;
}

LayerOutputs EncoderModel::layers(std::span<const text::Token> sentence) const {
  return forward(sentence, false, nullptr, nullptr);
}

void EncoderModel::backward(const ForwardCache& cache, const Tensor& d_top) {
  const std::size_t h = config_.d_lm;
  expect_shape(d_top, {cache.char_ids.size(), 2 * h}, "encoder top-layer gradient");
  Tensor d_f = slice_cols(d_top, 0, h);
  Tensor d_b = nn::reverse_rows(slice_cols(d_top, h, h));
  for (std::size_t k = fwd_.size(); k-- > 0;) {
    d_f = nn::dropout_backward(cache.fwd_drop[k], fwd_[k].backward(params_, cache.fwd[k], d_f).dx);
    d_b = nn::dropout_backward(cache.bwd_drop[k], bwd_[k].backward(params_, cache.bwd[k], d_b).dx);
  }
  const Tensor d_b_words = nn::reverse_rows(d_b);
  for (std::size_t i = 0; i < d_f.size(); ++i) d_f[i] += d_b_words[i];

  Tensor d_features = projection_.backward(params_, cache.projected_input, d_f);
  for (std::size_t k = highways_.size(); k-- > 0;) {
    d_features = highways_[k].backward(params_, cache.highway[k], d_features);
  }
  for (std::size_t w = 0; w < cache.char_ids.size(); ++w) {
    const std::size_t len = cache.char_ids[w].size();
    Tensor d_emb({len, config_.d_char});
    std::size_t col = 0;
    for (std::size_t g = 0; g < convs_.size(); ++g) {
      Tensor dy({convs_[g].count});
      for (std::size_t c = 0; c < convs_[g].count; ++c) dy[c] = d_features(w, col + c);
      const Tensor dx = convs_[g].backward(params_, cache.conv[w][g], dy);
      for (std::size_t i = 0; i < d_emb.size(); ++i) d_emb[i] += dx[i];
      col += convs_[g].count;
    }
    char_embed_.backward(params_, cache.char_ids[w], d_emb);
  }
}

std::vector<Tensor> EncoderModel::mix_inputs(const LayerOutputs& outputs) const {
  std::vector<Tensor> xs;
  xs.reserve(mix_width());
  if (config_.d_word == config_.d_ctx()) {
    xs.push_back(outputs.words);
  } else if (2 * config_.d_word == config_.d_ctx()) {
    xs.push_back(concat_cols(outputs.words, outputs.words));
  } else {
    throw UsageError("character layer width does not fit the scalar mix");
  }
  for (const auto& l : outputs.layers) xs.push_back(l);
  return xs;
}

Tensor EncoderModel::contextualize(std::span<const text::Token> sentence, const ScalarMix* mix,
                                   const nn::ParamStore* mix_store) const {
  LayerOutputs outputs = layers(sentence);
  if (config_.mix_mode == MixMode::top_layer) return std::move(outputs.layers.back());
  const auto xs = mix_inputs(outputs);
  if (mix != nullptr) {
    if (mix_store == nullptr) throw UsageError("scalar mix given without its parameters");
    return mix->forward(*mix_store, xs);
  }
  Tensor y(xs[0].shape());
  for (const auto& x : xs) {
    for (std::size_t i = 0; i < y.size(); ++i) y[i] += x[i] / static_cast<double>(xs.size());
  }
  return y;
}

}  // namespace cuenet::encoder
