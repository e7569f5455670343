#include <benchmark/benchmark.h>

#include <memory>

#include "cuenet/classifier/model.hpp"
#include "cuenet/config/run_config.hpp"
#include "cuenet/encoder/language_model.hpp"
#include "cuenet/text/tokenizer.hpp"

namespace {

using namespace cuenet;

std::vector<corpus::Example> examples() {
  const char* lines[] = {
      "Oh GREAT, another Monday!!! :) #blessed",
      "I love being ignored",
      "the meeting went fine and we left early",
      "SOOO \"great\" \xF0\x9F\x98\xA4 #mondays",
  };
  std::vector<corpus::Example> out;
  int i = 0;
  for (const char* line : lines) {
    corpus::Example ex;
    ex.id = std::to_string(i++);
    ex.text = line;
    ex.tokens = text::tokenize(line);
    out.push_back(ex);
  }
  return out;
}

// Desk-preset encoder and classifier with random weights.
struct DeskModel {
  std::shared_ptr<encoder::EncoderModel> encoder;
  std::unique_ptr<classifier::ClassifierModel> classifier;
  std::vector<corpus::Example> batch = examples();

  DeskModel() {
    const auto cfg = config::RunConfig::preset("desk");
    std::vector<text::TokenSequence> corpus;
    for (const auto& ex : batch) corpus.push_back(ex.tokens);
    encoder = std::make_shared<encoder::EncoderModel>(encoder::make_encoder(cfg.encoder, corpus, 1));
    encoder->freeze();
    classifier = std::make_unique<classifier::ClassifierModel>(cfg.classifier, encoder, 1);
  }
};

void BM_EncoderContextualize(benchmark::State& state) {
  DeskModel m;
  for (auto _ : state) {
    for (const auto& ex : m.batch) benchmark::DoNotOptimize(m.encoder->contextualize(ex.tokens));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(m.batch.size()));
}
BENCHMARK(BM_EncoderContextualize);

void BM_ClassifierPredict(benchmark::State& state) {
  DeskModel m;
  for (auto _ : state) {
    for (const auto& ex : m.batch) benchmark::DoNotOptimize(m.classifier->predict(ex));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(m.batch.size()));
}
BENCHMARK(BM_ClassifierPredict);

void BM_ClassifierForwardBatch(benchmark::State& state) {
  DeskModel m;
  for (auto _ : state) benchmark::DoNotOptimize(m.classifier->forward_batch(m.batch));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(m.batch.size()));
}
BENCHMARK(BM_ClassifierForwardBatch);

void BM_LmSentenceLossWithGradient(benchmark::State& state) {
  const auto cfg = config::RunConfig::preset("desk");
  std::vector<text::TokenSequence> corpus;
  for (const auto& ex : examples()) corpus.push_back(ex.tokens);
  auto model = encoder::make_encoder(cfg.encoder, corpus, 2);
  for (auto _ : state) {
    for (const auto& s : corpus) {
      benchmark::DoNotOptimize(encoder::lm_sentence_loss(model, s, true));
    }
    model.params().zero_grad();
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(corpus.size()));
}
BENCHMARK(BM_LmSentenceLossWithGradient);

}  // namespace
