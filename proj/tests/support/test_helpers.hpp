#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <initializer_list>
#include <string>
#include <vector>

#include "actionpiece/corpus.hpp"
#include "actionpiece/node_list.hpp"
#include "actionpiece/rng.hpp"

namespace aptest {

using namespace actionpiece;

// Sequence literal: {{0,1},{2,3}} = two actions of two features each.
inline ActionSequence make_sequence(std::initializer_list<std::initializer_list<FeatureId>> sets) {
  ActionSequence seq;
  for (const auto& s : sets) {
    FeatureSet set(s);
    std::sort(set.begin(), set.end());
    seq.actions.push_back(std::move(set));
  }
  return seq;
}

inline Corpus make_corpus(
    std::initializer_list<std::initializer_list<std::initializer_list<FeatureId>>> sequences) {
  Corpus corpus;
  for (const auto& seq : sequences) {
    ActionSequence s;
    for (const auto& set : seq) {
      FeatureSet fs(set);
      std::sort(fs.begin(), fs.end());
      s.actions.push_back(std::move(fs));
    }
    corpus.sequences.push_back(std::move(s));
  }
  return corpus;
}

// Registers features 0..n-1 so token ids equal feature ids in tests.
inline FeatureRegistry dense_registry(std::size_t n) {
  FeatureRegistry registry;
  for (std::size_t f = 0; f < n; ++f) registry.add(static_cast<FeatureId>(f));
  return registry;
}

inline FeatureRegistry registry_covering(const Corpus& corpus) {
  FeatureId max_f = 0;
  for (const auto& s : corpus.sequences)
    for (const auto& a : s.actions)
      for (FeatureId f : a) max_f = std::max(max_f, f);
  return dense_registry(static_cast<std::size_t>(max_f) + 1);
}

struct RandomCorpusParams {
  std::size_t max_sequences = 50;
  std::size_t max_actions = 10;
  std::size_t max_set_size = 4;
  std::size_t min_universe = 2;
  std::size_t max_universe = 30;
};

// Small adversarial corpora for engine-equivalence runs: tiny feature
// universes force heavy token repetition within and across sequences.
inline Corpus random_small_corpus(std::uint64_t seed, std::size_t& universe_out,
                                  const RandomCorpusParams& params = {}) {
  SplitMix64 rng(mix_seed(seed, 0x7e57));
  const std::size_t universe =
      params.min_universe + rng.bounded(params.max_universe - params.min_universe + 1);
  universe_out = universe;
  const std::size_t n_sequences = 1 + rng.bounded(params.max_sequences);
  Corpus corpus;
  std::vector<FeatureId> pool(universe);
  for (std::size_t f = 0; f < universe; ++f) pool[f] = f;
  for (std::size_t s = 0; s < n_sequences; ++s) {
    ActionSequence seq;
    const std::size_t len = 1 + rng.bounded(params.max_actions);
    for (std::size_t a = 0; a < len; ++a) {
      const std::size_t size = 1 + rng.bounded(std::min(params.max_set_size, universe));
      seeded_shuffle(pool, rng);
      FeatureSet set(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(size));
      std::sort(set.begin(), set.end());
      seq.actions.push_back(std::move(set));
    }
    corpus.sequences.push_back(std::move(seq));
  }
  return corpus;
}

inline std::string temp_dir(const std::string& name) {
  const std::string dir = std::string("aptest_") + name;
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace aptest
