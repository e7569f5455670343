#include <benchmark/benchmark.h>

#include "cuenet/nn/adam.hpp"
#include "cuenet/nn/lstm.hpp"
#include "cuenet/nn/param_store.hpp"
#include "cuenet/rng.hpp"

namespace {

using cuenet::Rng;
using namespace cuenet::nn;

Tensor random_input(std::size_t rows, std::size_t cols, Rng& rng) {
  Tensor t({rows, cols});
  for (double& v : t.values()) v = rng.uniform(-1.0, 1.0);
  return t;
}

// Arguments: sequence length, hidden width (input width equals hidden).
void BM_LstmForward(benchmark::State& state) {
  const auto steps = static_cast<std::size_t>(state.range(0));
  const auto width = static_cast<std::size_t>(state.range(1));
  ParamStore store;
  Rng rng(1);
  const auto lstm = Lstm::create(store, "l", width, width, rng);
  const Tensor x = random_input(steps, width, rng);
  for (auto _ : state) {
    benchmark::DoNotOptimize(lstm.forward(store, x));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(steps));
}
BENCHMARK(BM_LstmForward)->Args({20, 64})->Args({40, 128})->Args({40, 512});

void BM_LstmForwardBackward(benchmark::State& state) {
  const auto steps = static_cast<std::size_t>(state.range(0));
  const auto width = static_cast<std::size_t>(state.range(1));
  ParamStore store;
  Rng rng(2);
  const auto lstm = Lstm::create(store, "l", width, width, rng);
  const Tensor x = random_input(steps, width, rng);
  const Tensor dh({steps, width}, 1.0);
  for (auto _ : state) {
    Lstm::Cache cache;
    lstm.forward(store, x, &cache);
    benchmark::DoNotOptimize(lstm.backward(store, cache, dh));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(steps));
}
BENCHMARK(BM_LstmForwardBackward)->Args({20, 64})->Args({40, 128});

void BM_BiLstmPaddedBatch(benchmark::State& state) {
  const std::size_t batch = 16;
  const std::size_t steps = 30;
  const auto width = static_cast<std::size_t>(state.range(0));
  ParamStore store;
  Rng rng(3);
  const auto bi = BiLstm::create(store, "bi", width, width, rng);
  Tensor x({batch, steps, width});
  for (double& v : x.values()) v = rng.uniform(-1.0, 1.0);
  std::vector<std::size_t> lengths(batch);
  for (std::size_t b = 0; b < batch; ++b) lengths[b] = 5 + (b * 7) % (steps - 4);
  for (auto _ : state) {
    benchmark::DoNotOptimize(bi.forward_padded(store, x, lengths, 0.0));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(batch));
}
BENCHMARK(BM_BiLstmPaddedBatch)->Arg(64)->Arg(128);

void BM_AdamStep(benchmark::State& state) {
  ParamStore store;
  Rng rng(4);
  Lstm::create(store, "l", 256, 256, rng);
  AdamState adam(1e-3);
  for (auto _ : state) {
    for (auto& p : store.entries()) p.grad.fill(1e-3);
    adam_step(store, adam);
  }
  state.SetItemsProcessed(state.iterations() *
                          static_cast<std::int64_t>(store.scalar_count()));
}
BENCHMARK(BM_AdamStep);

}  // namespace
