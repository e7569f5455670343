#include "cuenet/encoder/language_model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "cuenet/encoder/io.hpp"
#include "cuenet/error.hpp"
#include "cuenet/nn/adam.hpp"

namespace cuenet::encoder {

using nn::Tensor;

namespace {

// Rows [first, first + count) and columns [col, col + width) of x.
Tensor block(const Tensor& x, std::size_t first, std::size_t count, std::size_t col,
             std::size_t width) {
  Tensor out({count, width});
  for (std::size_t r = 0; r < count; ++r) {
    auto src = x.row(first + r).subspan(col, width);
    std::copy(src.begin(), src.end(), out.row(r).begin());
  }
  return out;
}

// Softmax cross-entropy per row against `targets`; turns `logits` into
// d(loss)/d(logits) in place when `grad` is set.
double rows_nll(Tensor& logits, std::span<const std::size_t> targets, bool grad) {
  double total = 0.0;
  const std::size_t v = logits.cols();
  for (std::size_t r = 0; r < logits.rows(); ++r) {
    auto row = logits.row(r);
    const double m = *std::max_element(row.begin(), row.end());
    double z = 0.0;
    for (double x : row) z += std::exp(x - m);
    const double lse = m + std::log(z);
    total += lse - row[targets[r]];
    if (grad) {
      for (std::size_t c = 0; c < v; ++c) row[c] = std::exp(row[c] - lse);
      row[targets[r]] -= 1.0;
    }
  }
  return total;
}

bool has_prediction(const text::TokenSequence& s) { return s.size() >= 2; }

void clip(nn::ParamStore& store, double max_norm) {
  if (max_norm <= 0.0) return;
  const double norm = store.grad_norm();
  if (norm > max_norm) store.scale_grads(max_norm / norm);
}

}  // namespace

double LmEvaluation::perplexity() const {
  if (predictions == 0) return 1.0;
  return std::exp(nll / static_cast<double>(predictions));
}

LmEvaluation lm_sentence_loss(EncoderModel& model, const text::TokenSequence& sentence,
                              bool with_grad, bool train, Rng* rng) {
  LmEvaluation result;
  if (!has_prediction(sentence)) return result;
  const std::size_t t_len = sentence.size();
  const std::size_t h = model.config().d_lm;
  std::vector<std::size_t> ids(t_len);
  for (std::size_t t = 0; t < t_len; ++t) ids[t] = model.word_vocab().index(sentence[t].surface);

  EncoderModel::ForwardCache cache;
  const LayerOutputs out = model.forward(sentence, train, rng, with_grad ? &cache : nullptr);
  const Tensor& top = out.top();
  const nn::Linear& softmax = model.lm_softmax();

  // Forward states at 0..T-2 predict words 1..T-1; backward states at
  // 1..T-1 predict words 0..T-2.
  const Tensor fwd_states = block(top, 0, t_len - 1, 0, h);
  const Tensor bwd_states = block(top, 1, t_len - 1, h, h);
  Tensor fwd_logits = softmax.forward(model.params(), fwd_states);
  Tensor bwd_logits = softmax.forward(model.params(), bwd_states);
  result.nll = rows_nll(fwd_logits, std::span(ids).subspan(1), with_grad) +
               rows_nll(bwd_logits, std::span(ids).first(t_len - 1), with_grad);
  result.predictions = 2 * (t_len - 1);
  if (!with_grad) return result;

  const Tensor d_fwd = softmax.backward(model.params(), fwd_states, fwd_logits);
  const Tensor d_bwd = softmax.backward(model.params(), bwd_states, bwd_logits);
  Tensor d_top({t_len, 2 * h});
  for (std::size_t t = 0; t + 1 < t_len; ++t) {
    for (std::size_t c = 0; c < h; ++c) {
      d_top(t, c) = d_fwd(t, c);
      d_top(t + 1, h + c) = d_bwd(t, c);
    }
  }
  model.backward(cache, d_top);
  return result;
}

LmEvaluation evaluate_lm(const EncoderModel& model, std::span<const text::TokenSequence> corpus) {
  LmEvaluation total;
  // Without gradients the model is only read.
  auto& mutable_model = const_cast<EncoderModel&>(model);
  for (const auto& s : corpus) {
    const LmEvaluation e = lm_sentence_loss(mutable_model, s, false);
    total.nll += e.nll;
    total.predictions += e.predictions;
  }
  return total;
}

EncoderModel make_encoder(const EncoderConfig& config,
                          std::span<const text::TokenSequence> corpus, std::uint64_t seed) {
  return EncoderModel(config, CharVocab::build(corpus), WordVocab::build(corpus, config.max_vocab),
                      seed);
}

LmLog pretrain_lm(std::span<const text::TokenSequence> corpus, EncoderModel& model,
                  const LmOptions& options, std::span<const text::TokenSequence> heldout) {
  std::vector<std::size_t> usable;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    if (has_prediction(corpus[i])) usable.push_back(i);
  }
  if (usable.empty()) throw EmptyCorpus();
  if (model.frozen()) throw UsageError("cannot pretrain a frozen encoder");
  if (options.batch_size == 0) throw UsageError("LM batch size must be positive");

  const bool use_heldout = std::any_of(heldout.begin(), heldout.end(), has_prediction);
  auto selection_perplexity = [&](double train_ppl) {
    return use_heldout ? evaluate_lm(model, heldout).perplexity() : train_ppl;
  };

  LmLog log;
  log.initial_perplexity = use_heldout ? evaluate_lm(model, heldout).perplexity()
                                       : evaluate_lm(model, corpus).perplexity();
  log.best_perplexity = log.initial_perplexity;
  nn::ParamStore best = model.params();

  Rng rng(options.seed);
  nn::AdamState adam(options.lr);
  model.params().zero_grad();
  for (std::size_t epoch = 1; epoch <= options.epochs; ++epoch) {
    rng.shuffle(usable);
    for (std::size_t start = 0; start < usable.size(); start += options.batch_size) {
      const std::size_t end = std::min(start + options.batch_size, usable.size());
      std::size_t predictions = 0;
      for (std::size_t k = start; k < end; ++k) {
        predictions += lm_sentence_loss(model, corpus[usable[k]], true, true, &rng).predictions;
      }
      model.params().scale_grads(1.0 / static_cast<double>(predictions));
      clip(model.params(), options.clip_norm);
      nn::adam_step(model.params(), adam);
    }
    LmEpochRecord record;
    record.epoch = epoch;
    record.train_perplexity = evaluate_lm(model, corpus).perplexity();
    if (use_heldout) record.heldout_perplexity = selection_perplexity(record.train_perplexity);
    const double score = record.heldout_perplexity.value_or(record.train_perplexity);
    if (!std::isfinite(score)) throw NonFiniteLoss(epoch, 0);
    if (score < log.best_perplexity) {
      log.best_perplexity = score;
      log.best_epoch = epoch;
      best = model.params();
      if (options.best_checkpoint) save_encoder(*options.best_checkpoint, model);
    }
    log.epochs.push_back(record);
    if (options.on_epoch) options.on_epoch(record);
  }
  model.params().copy_values_from(best);
  model.params().zero_grad();
  return log;
}

}  // namespace cuenet::encoder
