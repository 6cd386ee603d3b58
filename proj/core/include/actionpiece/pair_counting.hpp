#pragma once

#include <cstddef>
#include <unordered_map>

#include "actionpiece/node_list.hpp"
#include "actionpiece/types.hpp"

namespace actionpiece {

// Keyed by pack_pair(left, right); values are scale-multiplied exact weights.
using PairCountMap = std::unordered_map<std::uint64_t, Weight>;

struct CountingOptions {
  bool context_aware = true;  // count pairs across adjacent nodes
  bool weighted = true;       // size-dependent weights vs. flat 1 per co-occurrence
  Weight scale = 1;
};

enum class PairContext { WithinSet, AdjacentSets };

// WithinSet: 2*scale/size_a.  AdjacentSets: scale/(size_a*size_b).
// With weighted == false both collapse to `scale`.
Weight pair_weight(PairContext context, std::size_t size_a, std::size_t size_b,
                   const CountingOptions& options);

// Adds one sequence's contributions: each unordered within-node pair is
// written to both orders, each ordered cross pair of adjacent nodes to the
// forward order only.
void accumulate_pairs(const NodeList& list, const CountingOptions& options,
                      PairCountMap& into);

PairCountMap count_pairs(const NodeCorpus& corpus, const CountingOptions& options,
                         unsigned threads = 1);

// Largest per-action set size supported by the exact-arithmetic scale.
inline constexpr std::size_t kMaxSetSize = 28;

// lcm(1..max_size)^2: the smallest factor that keeps every within-set and
// cross-set weight integral.
Weight compute_scale(std::size_t max_set_size);

}  // namespace actionpiece
