#include <algorithm>
#include <chrono>
#include <sstream>

#include "actionpiece/construction.hpp"

namespace actionpiece {

std::optional<TokenPair> select_max(const PairCountMap& counts) {
  std::optional<TokenPair> best;
  Weight best_weight = 0;
  for (const auto& [key, weight] : counts) {
    if (weight == 0) continue;
    const TokenPair pair = unpack_pair(key);
    if (!best || weight > best_weight || (weight == best_weight && pair < *best)) {
      best = pair;
      best_weight = weight;
    }
  }
  return best;
}

std::string format_iteration_log(const IterationLog& entry) {
  std::ostringstream os;
  os << entry.iteration << ',' << entry.pair.left << ',' << entry.pair.right << ','
     << to_string(entry.weight) << ',' << entry.heap_size;
  return os.str();
}

namespace detail {

void check_build_preconditions(const Corpus& corpus, const FeatureRegistry& registry,
                               const ConstructionConfig& config) {
  if (registry.empty()) throw ValidationError("feature registry is empty");
  if (corpus.sequences.empty()) throw ValidationError("corpus is empty");
  if (config.target_size < registry.size())
    throw ValidationError("target vocabulary size " + std::to_string(config.target_size) +
                          " is below the initial vocabulary size " +
                          std::to_string(registry.size()));
}

}  // namespace detail

BuildResult build_vocab_naive(const Corpus& corpus, const FeatureRegistry& registry,
                              const ConstructionConfig& config) {
  detail::check_build_preconditions(corpus, registry, config);
  const Weight scale = compute_scale(std::max<std::size_t>(1, corpus.max_set_size()));

  BuildResult result;
  result.vocab = Vocabulary(static_cast<std::uint32_t>(registry.size()), scale);
  result.corpus = tokenize_corpus(corpus, registry);

  const CountingOptions copts{config.context_aware, config.weighted, scale};
  const MergeOptions mopts{config.context_aware, config.validate_each_merge};

  while (result.vocab.size() < config.target_size) {
    const auto start = std::chrono::steady_clock::now();
    const PairCountMap counts = count_pairs(result.corpus, copts, config.threads);
    const auto chosen = select_max(counts);
    if (!chosen) {
      result.exhausted = true;
      break;
    }
    const MergeRule rule = result.vocab.add_rule(chosen->left, chosen->right);
    std::size_t touched = 0;
    for (auto& list : result.corpus)
      if (apply_merge(list, rule, mopts) > 0) ++touched;
    if (config.collect_log) {
      const double seconds =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      result.log.push_back(IterationLog{rule.index, *chosen,
                                        counts.at(pack_pair(*chosen)), counts.size(),
                                        touched, seconds});
    }
  }
  return result;
}

BuildResult build_vocab(const Corpus& corpus, const FeatureRegistry& registry,
                        const ConstructionConfig& config) {
  return config.engine == Engine::Naive ? build_vocab_naive(corpus, registry, config)
                                        : build_vocab_efficient(corpus, registry, config);
}

}  // namespace actionpiece
