#include <benchmark/benchmark.h>

#include "actionpiece/construction.hpp"
#include "actionpiece/synth.hpp"

using namespace actionpiece;

namespace {

SynthResult make_data(std::uint32_t num_sequences) {
  SynthConfig config;
  config.seed = 17;
  config.num_sequences = num_sequences;
  config.min_actions = 10;
  config.max_actions = 10;
  config.fields = 5;
  config.codes_per_field = 200;
  config.skew = 1.1;
  return generate_corpus(config);
}

}  // namespace

static void BM_BuildEfficient(benchmark::State& state) {
  const SynthResult data = make_data(static_cast<std::uint32_t>(state.range(0)));
  ConstructionConfig config;
  config.target_size = static_cast<std::uint32_t>(data.features.size()) + 500;
  config.engine = Engine::Efficient;
  for (auto _ : state) {
    const BuildResult result = build_vocab(data.corpus, data.features, config);
    benchmark::DoNotOptimize(result.vocab.rules().size());
  }
}
BENCHMARK(BM_BuildEfficient)->Arg(250)->Arg(500)->Arg(1000)->Arg(2000)
    ->Unit(benchmark::kMillisecond)->UseRealTime();

static void BM_BuildNaive(benchmark::State& state) {
  const SynthResult data = make_data(static_cast<std::uint32_t>(state.range(0)));
  ConstructionConfig config;
  config.target_size = static_cast<std::uint32_t>(data.features.size()) + 500;
  config.engine = Engine::Naive;
  for (auto _ : state) {
    const BuildResult result = build_vocab(data.corpus, data.features, config);
    benchmark::DoNotOptimize(result.vocab.rules().size());
  }
}
BENCHMARK(BM_BuildNaive)->Arg(250)->Arg(500)
    ->Unit(benchmark::kMillisecond)->UseRealTime();

static void BM_CountPairs(benchmark::State& state) {
  const SynthResult data = make_data(1000);
  const NodeCorpus nodes = tokenize_corpus(data.corpus, data.features);
  CountingOptions options;
  options.scale = compute_scale(data.corpus.max_set_size());
  for (auto _ : state) {
    const PairCountMap counts = count_pairs(nodes, options,
                                            static_cast<unsigned>(state.range(0)));
    benchmark::DoNotOptimize(counts.size());
  }
}
BENCHMARK(BM_CountPairs)->Arg(1)->Arg(2)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
