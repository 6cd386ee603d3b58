#include <algorithm>
#include <chrono>
#include <queue>
#include <unordered_set>

#include "actionpiece/construction.hpp"

namespace actionpiece {

namespace detail {
void check_build_preconditions(const Corpus& corpus, const FeatureRegistry& registry,
                               const ConstructionConfig& config);
}

namespace {

struct HeapEntry {
  Weight weight;
  std::uint64_t pair;
};

// Max weight first; equal weights fall back to the smaller packed pair
// (lower left id, then lower right id), matching select_max exactly.
struct HeapLess {
  bool operator()(const HeapEntry& a, const HeapEntry& b) const {
    if (a.weight != b.weight) return a.weight < b.weight;
    return a.pair > b.pair;
  }
};

using LazyHeap = std::priority_queue<HeapEntry, std::vector<HeapEntry>, HeapLess>;

}  // namespace

BuildResult build_vocab_efficient(const Corpus& corpus, const FeatureRegistry& registry,
                                  const ConstructionConfig& config) {
  detail::check_build_preconditions(corpus, registry, config);
  const Weight scale = compute_scale(std::max<std::size_t>(1, corpus.max_set_size()));

  BuildResult result;
  result.vocab = Vocabulary(static_cast<std::uint32_t>(registry.size()), scale);
  result.corpus = tokenize_corpus(corpus, registry);

  const CountingOptions copts{config.context_aware, config.weighted, scale};
  const MergeOptions mopts{config.context_aware, config.validate_each_merge};

  // Authoritative counts (no zero entries kept), inverted index
  // pair -> sequences currently containing it, and the lazy heap. An entry is
  // stale iff its recorded weight differs from the current count; stale
  // entries are discarded on extraction and a fresh entry is pushed whenever
  // a pair's count changes.
  PairCountMap counts;
  std::unordered_map<std::uint64_t, std::unordered_set<SeqIndex>> index;
  for (std::size_t s = 0; s < result.corpus.size(); ++s) {
    PairCountMap local;
    accumulate_pairs(result.corpus[s], copts, local);
    for (const auto& [pair, weight] : local) {
      counts[pair] += weight;
      index[pair].insert(static_cast<SeqIndex>(s));
    }
  }
  LazyHeap heap;
  for (const auto& [pair, weight] : counts) heap.push(HeapEntry{weight, pair});

  std::unordered_map<std::uint64_t, SignedWeight> delta;
  while (result.vocab.size() < config.target_size) {
    const auto start = std::chrono::steady_clock::now();

    std::optional<TokenPair> chosen;
    Weight chosen_weight = 0;
    while (!heap.empty()) {
      const HeapEntry top = heap.top();
      heap.pop();
      const auto it = counts.find(top.pair);
      if (it == counts.end() || it->second != top.weight) continue;
      chosen = unpack_pair(top.pair);
      chosen_weight = top.weight;
      break;
    }
    if (!chosen) {
      result.exhausted = true;
      break;
    }
    const std::size_t heap_size = heap.size();

    const MergeRule rule = result.vocab.add_rule(chosen->left, chosen->right);
    const std::uint64_t chosen_key = pack_pair(*chosen);

    std::vector<SeqIndex> affected(index.at(chosen_key).begin(), index.at(chosen_key).end());
    std::sort(affected.begin(), affected.end());

    delta.clear();
    for (const SeqIndex s : affected) {
      NodeList& list = result.corpus[s];
      PairCountMap before;
      accumulate_pairs(list, copts, before);
      if (apply_merge(list, rule, mopts) == 0)
        throw InternalError("inverted index listed a sequence without the merged pair");
      PairCountMap after;
      accumulate_pairs(list, copts, after);

      for (const auto& [pair, weight] : after) {
        const auto b = before.find(pair);
        const Weight old_weight = b == before.end() ? 0 : b->second;
        if (weight != old_weight)
          delta[pair] += static_cast<SignedWeight>(weight) - static_cast<SignedWeight>(old_weight);
        if (old_weight == 0) index[pair].insert(s);
        else before.erase(b);
      }
      // Whatever is left in `before` vanished from this sequence.
      for (const auto& [pair, weight] : before) {
        delta[pair] -= static_cast<SignedWeight>(weight);
        const auto ii = index.find(pair);
        ii->second.erase(s);
        if (ii->second.empty()) index.erase(ii);
      }
    }

    for (const auto& [pair, d] : delta) {
      if (d == 0) continue;
      const auto it = counts.find(pair);
      SignedWeight updated = (it == counts.end() ? 0 : static_cast<SignedWeight>(it->second)) + d;
      if (updated < 0) throw InternalError("pair count went negative");
      if (updated == 0) {
        if (it != counts.end()) counts.erase(it);
      } else {
        const Weight fresh = static_cast<Weight>(updated);
        counts[pair] = fresh;
        heap.push(HeapEntry{fresh, pair});
      }
    }

    if (config.collect_log) {
      const double seconds =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      result.log.push_back(IterationLog{rule.index, *chosen, chosen_weight, heap_size,
                                        affected.size(), seconds});
    }
  }
  return result;
}

}  // namespace actionpiece
