#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "actionpiece/corpus.hpp"
#include "actionpiece/node_list.hpp"
#include "actionpiece/pair_counting.hpp"
#include "actionpiece/vocabulary.hpp"

namespace actionpiece {

enum class Engine { Naive, Efficient };

struct ConstructionConfig {
  std::uint32_t target_size = 0;  // Q: total vocabulary size to reach
  bool context_aware = true;
  bool weighted = true;
  Engine engine = Engine::Efficient;
  unsigned threads = 1;
  bool collect_log = false;
  bool validate_each_merge = false;
};

struct IterationLog {
  std::uint32_t iteration = 0;
  TokenPair pair;
  Weight weight = 0;
  std::size_t heap_size = 0;        // candidate-structure size at selection
  std::size_t touched_sequences = 0;
  double seconds = 0.0;
};

struct BuildResult {
  Vocabulary vocab;
  NodeCorpus corpus;  // final merged state
  std::vector<IterationLog> log;
  bool exhausted = false;  // ran out of co-occurring pairs before reaching Q
};

// Argmax under (weight desc, left asc, right asc); nullopt when no entry
// has positive weight.
std::optional<TokenPair> select_max(const PairCountMap& counts);

struct MergeOptions {
  bool context_aware = true;
  bool validate = false;
};

// Applies one rule left-to-right across a sequence (or every sequence),
// maintaining the action/intermediate node structure. Returns the number of
// merges performed.
std::size_t apply_merge(NodeList& list, const MergeRule& rule,
                        const MergeOptions& options = {});
std::size_t apply_merge(NodeCorpus& corpus, const MergeRule& rule,
                        const MergeOptions& options = {});

// Reference engine: full recount every iteration.
BuildResult build_vocab_naive(const Corpus& corpus, const FeatureRegistry& registry,
                              const ConstructionConfig& config);

// Lazy-heap engine: max-heap over (weight, pair) entries with stale-entry
// discard on pop, plus an inverted index pair -> sequences so each merge
// touches only the sequences that contain it. Output is identical to the
// naive engine on the same input.
BuildResult build_vocab_efficient(const Corpus& corpus, const FeatureRegistry& registry,
                                  const ConstructionConfig& config);

BuildResult build_vocab(const Corpus& corpus, const FeatureRegistry& registry,
                        const ConstructionConfig& config);

// Progress-log line: `iter,left,right,scaled_weight,heap_size`.
std::string format_iteration_log(const IterationLog& entry);

}  // namespace actionpiece
