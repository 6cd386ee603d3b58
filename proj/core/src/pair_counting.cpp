#include "actionpiece/pair_counting.hpp"

#include <numeric>
#include <thread>

namespace actionpiece {

Weight compute_scale(std::size_t max_set_size) {
  if (max_set_size == 0) throw ValidationError("scale requires a positive set size");
  if (max_set_size > kMaxSetSize)
    throw ValidationError("action set size " + std::to_string(max_set_size) +
                          " exceeds the supported maximum of " + std::to_string(kMaxSetSize));
  std::uint64_t lcm = 1;
  for (std::uint64_t k = 2; k <= max_set_size; ++k) lcm = std::lcm(lcm, k);
  return static_cast<Weight>(lcm) * static_cast<Weight>(lcm);
}

Weight pair_weight(PairContext context, std::size_t size_a, std::size_t size_b,
                   const CountingOptions& options) {
  if (size_a == 0 || (context == PairContext::AdjacentSets && size_b == 0))
    throw ValidationError("pair_weight: set sizes must be positive");
  if (!options.weighted) return options.scale;
  if (context == PairContext::WithinSet) {
    const Weight num = 2 * options.scale;
    if (num % size_a != 0) throw InternalError("scale not divisible by set size");
    return num / size_a;
  }
  const Weight denom = static_cast<Weight>(size_a) * size_b;
  if (options.scale % denom != 0) throw InternalError("scale not divisible by size product");
  return options.scale / denom;
}

void accumulate_pairs(const NodeList& list, const CountingOptions& options,
                      PairCountMap& into) {
  for (std::int32_t id = list.head(); id != -1; id = list.node(id).next) {
    const auto& n = list.node(id);
    const std::size_t size = n.tokens.size();
    if (size >= 2) {
      const Weight w = pair_weight(PairContext::WithinSet, size, 0, options);
      for (std::size_t i = 0; i < size; ++i)
        for (std::size_t j = i + 1; j < size; ++j) {
          into[pack_pair(n.tokens[i], n.tokens[j])] += w;
          into[pack_pair(n.tokens[j], n.tokens[i])] += w;
        }
    }
    if (options.context_aware && n.next != -1) {
      const auto& m = list.node(n.next);
      const Weight w =
          pair_weight(PairContext::AdjacentSets, size, m.tokens.size(), options);
      for (TokenId a : n.tokens)
        for (TokenId b : m.tokens) into[pack_pair(a, b)] += w;
    }
  }
}

PairCountMap count_pairs(const NodeCorpus& corpus, const CountingOptions& options,
                         unsigned threads) {
  if (threads <= 1 || corpus.size() < 2 * threads) {
    PairCountMap counts;
    for (const auto& list : corpus) accumulate_pairs(list, options, counts);
    return counts;
  }
  // Exact integer weights: per-shard maps reduce to the same totals as a
  // sequential pass regardless of scheduling.
  std::vector<PairCountMap> shards(threads);
  std::vector<std::thread> workers;
  workers.reserve(threads);
  const std::size_t chunk = (corpus.size() + threads - 1) / threads;
  for (unsigned t = 0; t < threads; ++t) {
    workers.emplace_back([&, t] {
      const std::size_t begin = t * chunk;
      const std::size_t end = std::min(corpus.size(), begin + chunk);
      for (std::size_t s = begin; s < end; ++s)
        accumulate_pairs(corpus[s], options, shards[t]);
    });
  }
  for (auto& w : workers) w.join();
  PairCountMap counts = std::move(shards[0]);
  for (unsigned t = 1; t < threads; ++t)
    for (const auto& [pair, weight] : shards[t]) counts[pair] += weight;
  return counts;
}

}  // namespace actionpiece
