#include "actionpiece/synth.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "actionpiece/rng.hpp"

namespace actionpiece {

namespace {

// Cumulative Zipf-like mass over ranks 0..n-1 (exponent 0 = uniform).
std::vector<double> zipf_cumulative(std::uint32_t n, double skew) {
  std::vector<double> cum(n);
  double total = 0.0;
  for (std::uint32_t r = 0; r < n; ++r) {
    total += 1.0 / std::pow(static_cast<double>(r + 1), skew);
    cum[r] = total;
  }
  for (auto& c : cum) c /= total;
  return cum;
}

std::uint32_t draw(const std::vector<double>& cum, SplitMix64& rng) {
  const double u = rng.unit();
  const auto it = std::lower_bound(cum.begin(), cum.end(), u);
  return static_cast<std::uint32_t>(std::min<std::size_t>(
      static_cast<std::size_t>(it - cum.begin()), cum.size() - 1));
}

}  // namespace

SynthResult generate_corpus(const SynthConfig& config) {
  if (config.num_sequences == 0) throw ValidationError("synth: need at least one sequence");
  if (config.fields == 0 || config.codes_per_field == 0)
    throw ValidationError("synth: fields and codes_per_field must be positive");
  if (config.min_actions == 0 || config.min_actions > config.max_actions)
    throw ValidationError("synth: invalid action-count range");
  if (config.skew < 0.0) throw ValidationError("synth: skew must be non-negative");

  SynthResult result;
  for (std::uint32_t k = 0; k < config.fields; ++k)
    for (std::uint32_t code = 0; code < config.codes_per_field; ++code)
      result.features.add(static_cast<FeatureId>(k) * config.codes_per_field + code);

  const std::vector<double> code_cum = zipf_cumulative(config.codes_per_field, config.skew);
  SplitMix64 rng(mix_seed(config.seed, 0x5eedc0de));

  std::vector<FeatureSet> pool;
  if (config.item_pool > 0) {
    // Field codes may collide between items; the per-item identification
    // feature keeps every tuple unique.
    const FeatureId id_base =
        static_cast<FeatureId>(config.fields) * config.codes_per_field;
    for (std::uint32_t i = 0; i < config.item_pool; ++i)
      result.features.add(id_base + i);
    pool.reserve(config.item_pool);
    for (std::uint32_t i = 0; i < config.item_pool; ++i) {
      FeatureSet tuple;
      tuple.reserve(config.fields + 1);
      for (std::uint32_t k = 0; k < config.fields; ++k)
        tuple.push_back(static_cast<FeatureId>(k) * config.codes_per_field +
                        draw(code_cum, rng));
      tuple.push_back(id_base + i);
      std::sort(tuple.begin(), tuple.end());
      result.items.add(i, tuple);
      pool.push_back(std::move(tuple));
    }
  }
  const std::vector<double> item_cum =
      pool.empty() ? std::vector<double>{} : zipf_cumulative(config.item_pool, config.skew);

  result.corpus.sequences.reserve(config.num_sequences);
  for (std::uint32_t s = 0; s < config.num_sequences; ++s) {
    const std::uint64_t span = config.max_actions - config.min_actions + 1;
    const std::uint32_t length =
        config.min_actions + static_cast<std::uint32_t>(rng.bounded(span));
    ActionSequence seq;
    seq.actions.reserve(length);
    for (std::uint32_t a = 0; a < length; ++a) {
      if (!pool.empty()) {
        seq.actions.push_back(pool[draw(item_cum, rng)]);
      } else {
        FeatureSet action;
        action.reserve(config.fields);
        for (std::uint32_t k = 0; k < config.fields; ++k)
          action.push_back(static_cast<FeatureId>(k) * config.codes_per_field +
                           draw(code_cum, rng));
        std::sort(action.begin(), action.end());
        seq.actions.push_back(std::move(action));
      }
    }
    result.corpus.sequences.push_back(std::move(seq));
  }
  return result;
}

}  // namespace actionpiece
