#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "actionpiece/corpus.hpp"
#include "actionpiece/segmentation.hpp"
#include "actionpiece/vocabulary.hpp"

namespace actionpiece {

struct RankedEntry {
  std::uint64_t item = 0;
  double score = 0.0;

  friend bool operator==(const RankedEntry&, const RankedEntry&) = default;
};

// Descending by score; ties broken by ascending item id.
using RankedList = std::vector<RankedEntry>;

// Mean over sequences of tokenized length / flattened feature length.
// encoded[i] must correspond to corpus.sequences[i].
double nsl(const std::vector<TokenSequence>& encoded, const Corpus& corpus);

struct UtilizationReport {
  std::size_t used = 0;
  std::size_t total = 0;
  double rate() const { return total == 0 ? 0.0 : static_cast<double>(used) / static_cast<double>(total); }
};

UtilizationReport token_utilization(const std::vector<TokenSequence>& encoded,
                                    const Vocabulary& vocab);

// Accumulates distinct token usage across batches (e.g. epochs).
class UtilizationAccumulator {
 public:
  explicit UtilizationAccumulator(const Vocabulary& vocab);
  void add(const TokenSequence& tokens);
  void add(const std::vector<TokenSequence>& batch);
  UtilizationReport report() const;

 private:
  std::vector<bool> seen_;
  std::size_t used_ = 0;
};

// Mean per-item score across q lists; an item absent from a list contributes
// 0 there. Output sorted descending, ties by ascending item id.
RankedList fuse_rankings(const std::vector<RankedList>& lists);

// Single-ground-truth forms: rank is 1-based within `fused`.
int recall_at_k(const RankedList& fused, std::uint64_t truth, std::size_t k);
double ndcg_at_k(const RankedList& fused, std::uint64_t truth, std::size_t k);

// Ranked-list file: `item_id<TAB>score` per line, '#' lines are comments.
RankedList load_ranked_list(const std::string& path);
void save_ranked_list(const RankedList& list, const std::string& path,
                      const std::vector<std::string>& header_comments = {});

}  // namespace actionpiece
