#pragma once

#include <cstdint>

#include "actionpiece/corpus.hpp"

namespace actionpiece {

// Seeded synthetic corpora: m feature fields with skewed code popularity,
// optionally drawing actions from a fixed item pool (with an extra
// identification field so every item's feature tuple is unique).
struct SynthConfig {
  std::uint64_t seed = 1;
  std::uint32_t num_sequences = 100;
  std::uint32_t min_actions = 2;
  std::uint32_t max_actions = 10;
  std::uint32_t fields = 5;
  std::uint32_t codes_per_field = 256;
  double skew = 1.0;           // Zipf exponent over codes (0 = uniform)
  std::uint32_t item_pool = 0; // 0 = sample fields independently per action
};

struct SynthResult {
  Corpus corpus;
  FeatureRegistry features;  // full field universe, field-major order
  ItemRegistry items;        // populated only in item-pool mode
};

SynthResult generate_corpus(const SynthConfig& config);

}  // namespace actionpiece
