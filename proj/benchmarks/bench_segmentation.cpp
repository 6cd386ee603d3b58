#include <benchmark/benchmark.h>

#include "actionpiece/construction.hpp"
#include "actionpiece/segmentation.hpp"
#include "actionpiece/synth.hpp"

using namespace actionpiece;

namespace {

struct Fixture {
  SynthResult data;
  BuildResult built;
  Fixture() {
    SynthConfig config;
    config.seed = 23;
    config.num_sequences = 500;
    config.min_actions = 10;
    config.max_actions = 10;
    config.fields = 5;
    config.codes_per_field = 128;
    config.skew = 1.1;
    data = generate_corpus(config);
    ConstructionConfig build_config;
    build_config.target_size = static_cast<std::uint32_t>(data.features.size()) + 1000;
    built = build_vocab(data.corpus, data.features, build_config);
  }
};

const Fixture& fixture() {
  static Fixture f;
  return f;
}

}  // namespace

static void BM_SprEncodeBatch(benchmark::State& state) {
  const Fixture& f = fixture();
  std::uint64_t epoch = 0;
  for (auto _ : state) {
    const auto records = encode_batch(f.data.corpus, f.built.vocab, f.data.features,
                                      SegmentationMode::Spr, ++epoch,
                                      static_cast<unsigned>(state.range(0)));
    benchmark::DoNotOptimize(records.size());
  }
}
BENCHMARK(BM_SprEncodeBatch)->Arg(1)->Arg(2)->Unit(benchmark::kMillisecond)->UseRealTime();

static void BM_NaiveEncodeBatch(benchmark::State& state) {
  const Fixture& f = fixture();
  for (auto _ : state) {
    const auto records = encode_batch(f.data.corpus, f.built.vocab, f.data.features,
                                      SegmentationMode::Naive, 0, 1);
    benchmark::DoNotOptimize(records.size());
  }
}
BENCHMARK(BM_NaiveEncodeBatch)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
