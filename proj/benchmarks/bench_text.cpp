#include <benchmark/benchmark.h>

#include <string>
#include <vector>

#include "cuenet/text/language.hpp"
#include "cuenet/text/tokenizer.hpp"

namespace {

const std::vector<std::string>& tweets() {
  static const std::vector<std::string> lines = {
      "Oh GREAT, another Monday!!! :) #blessed",
      "@john check https://t.co/x #sarcasm",
      "SOOO \"great\" \xF0\x9F\x98\xA4\xF0\x9F\x98\xA4 #mondays",
      "I love waiting 45 minutes for the bus... said nobody ever \xF0\x9F\x99\x84",
      "don't you just LOVE self-checkout machines?! www.example.com/rant",
  };
  return lines;
}

void BM_Tokenize(benchmark::State& state) {
  cuenet::text::TokenizerConfig cfg;
  cfg.strip_artifact_hashtags = true;
  std::int64_t bytes = 0;
  for (const auto& line : tweets()) bytes += static_cast<std::int64_t>(line.size());
  for (auto _ : state) {
    for (const auto& line : tweets()) benchmark::DoNotOptimize(cuenet::text::tokenize(line, cfg));
  }
  state.SetBytesProcessed(state.iterations() * bytes);
}
BENCHMARK(BM_Tokenize);

void BM_EnglishHeuristic(benchmark::State& state) {
  for (auto _ : state) {
    for (const auto& line : tweets()) benchmark::DoNotOptimize(cuenet::text::is_english(line));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(tweets().size()));
}
BENCHMARK(BM_EnglishHeuristic);

}  // namespace
