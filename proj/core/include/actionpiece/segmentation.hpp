#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "actionpiece/corpus.hpp"
#include "actionpiece/vocabulary.hpp"

namespace actionpiece {

using TokenSequence = std::vector<TokenId>;

enum class SegmentationMode { Spr, Naive };

SegmentationMode segmentation_mode_from_string(const std::string& name);
std::string to_string(SegmentationMode mode);

// Independently permutes each action's feature set (stream seeded from
// (seed, action index)) and concatenates in action order, as initial tokens.
TokenSequence permute_flatten(const ActionSequence& sequence,
                              const FeatureRegistry& registry, std::uint64_t seed);

// Repeatedly merges the adjacent pair matching the lowest-index rule,
// leftmost occurrence first, until no rule applies.
TokenSequence bpe_segment(TokenSequence flat, const Vocabulary& vocab);

TokenSequence spr_encode(const ActionSequence& sequence, const Vocabulary& vocab,
                         const FeatureRegistry& registry, std::uint64_t seed);

// Deterministic segmentation mirroring construction-time merging on the
// node structure; tokens are emitted in node order, ascending id inside a
// node.
TokenSequence naive_encode(const ActionSequence& sequence, const Vocabulary& vocab,
                           const FeatureRegistry& registry);

std::vector<TokenId> expand_to_initial(const TokenSequence& tokens,
                                       const Vocabulary& vocab);
std::vector<FeatureId> expand(const TokenSequence& tokens, const Vocabulary& vocab,
                              const FeatureRegistry& registry);

struct DecodeOutcome {
  enum class Status { Resolved, NotFound, InvalidGeneration };
  Status status = Status::NotFound;
  std::uint64_t item_id = 0;
  std::vector<FeatureId> features;  // expansion, in generation order
};

// Expands a single action's tokens and resolves them against the item
// registry. A repeated feature in the expansion is InvalidGeneration, which
// is distinct from an unknown feature set (NotFound).
DecodeOutcome decode_item(const TokenSequence& tokens, const Vocabulary& vocab,
                          const FeatureRegistry& registry, const ItemRegistry& items);

struct EncodedRecord {
  SeqIndex index = 0;
  std::uint64_t seed = 0;
  TokenSequence tokens;

  friend bool operator==(const EncodedRecord&, const EncodedRecord&) = default;
};

// Per-sequence seeds are derived from (epoch_seed, sequence index); Naive
// mode ignores them.
std::vector<EncodedRecord> encode_batch(const Corpus& corpus, const Vocabulary& vocab,
                                        const FeatureRegistry& registry,
                                        SegmentationMode mode, std::uint64_t epoch_seed,
                                        unsigned threads = 1);

// Encoded file: `seq_index<TAB>seed<TAB>space-separated token ids`; '#'
// lines are comments.
void save_encoded(const std::vector<EncodedRecord>& records, const std::string& path,
                  const std::vector<std::string>& header_comments = {});
std::vector<EncodedRecord> load_encoded(const std::string& path);

}  // namespace actionpiece
