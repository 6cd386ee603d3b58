#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "actionpiece/types.hpp"

namespace actionpiece {

// One action = one unordered feature set, kept sorted ascending, no duplicates.
using FeatureSet = std::vector<FeatureId>;

struct ActionSequence {
  std::vector<FeatureSet> actions;

  std::size_t flattened_size() const;

  friend bool operator==(const ActionSequence&, const ActionSequence&) = default;
};

struct Corpus {
  std::vector<ActionSequence> sequences;

  std::size_t size() const { return sequences.size(); }
  std::size_t total_actions() const;
  double mean_length() const;
  std::size_t max_set_size() const;

  friend bool operator==(const Corpus&, const Corpus&) = default;
};

// Registry of every feature id seen, in first-registration order. The
// position of a feature in this order is its initial token id, so the
// registry doubles as the initial-token table of a vocabulary.
class FeatureRegistry {
 public:
  TokenId add(FeatureId feature);
  std::optional<TokenId> find(FeatureId feature) const;
  TokenId require(FeatureId feature) const;  // throws DataError when unknown
  FeatureId feature_at(TokenId token) const;
  std::size_t size() const { return features_.size(); }
  bool empty() const { return features_.empty(); }
  const std::vector<FeatureId>& features() const { return features_; }

 private:
  std::vector<FeatureId> features_;
  std::unordered_map<FeatureId, TokenId> index_;
};

// Items keyed by their canonical (ascending) feature tuple; bijective.
class ItemRegistry {
 public:
  void add(std::uint64_t item_id, FeatureSet features);
  std::optional<std::uint64_t> resolve(FeatureSet features) const;
  const FeatureSet* features_of(std::uint64_t item_id) const;
  std::size_t size() const { return by_item_.size(); }

  const std::unordered_map<std::uint64_t, FeatureSet>& items() const { return by_item_; }

 private:
  struct TupleHash {
    std::size_t operator()(const FeatureSet& fs) const;
  };
  std::unordered_map<FeatureSet, std::uint64_t, TupleHash> by_tuple_;
  std::unordered_map<std::uint64_t, FeatureSet> by_item_;
};

// resolve_item is order-insensitive: the input is canonicalized before lookup.
std::optional<std::uint64_t> resolve_item(const FeatureSet& features,
                                          const ItemRegistry& registry);

struct LoadOptions {
  // Reject corpora whose action sets are not all the same size.
  bool strict_uniform_sizes = false;
};

// Corpus file: one action sequence per line, `[[1,2],[3,4]]`. Whitespace
// insignificant; blank lines and lines starting with '#' are skipped.
Corpus load_corpus(const std::string& path, FeatureRegistry& registry,
                   const LoadOptions& options = {});
Corpus parse_corpus(std::istream& in, FeatureRegistry& registry,
                    const LoadOptions& options, const std::string& source_name);
void save_corpus(const Corpus& corpus, const std::string& path,
                 const std::vector<std::string>& header_comments = {});

// Registry files: one feature id per line (order = initial token id), and
// `item_id<TAB>sorted,feature,ids` for items.
FeatureRegistry load_feature_registry(const std::string& path);
void save_feature_registry(const FeatureRegistry& registry, const std::string& path);
ItemRegistry load_item_registry(const std::string& path);
void save_item_registry(const ItemRegistry& registry, const std::string& path);

// Writes via a temp file in the same directory, then renames into place.
void atomic_write_text(const std::string& path, const std::string& contents);

}  // namespace actionpiece
