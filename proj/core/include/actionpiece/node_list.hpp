#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "actionpiece/corpus.hpp"
#include "actionpiece/types.hpp"

namespace actionpiece {

enum class NodeKind : std::uint8_t { Action, Intermediate };

// A sequence under construction: doubly-linked list of token-set nodes
// backed by an arena, so merges are O(1) structural edits. Action nodes keep
// the ordinal of the action they came from; intermediate nodes hold exactly
// one token bridging two actions.
class NodeList {
 public:
  struct Node {
    std::vector<TokenId> tokens;  // sorted ascending, no duplicates
    NodeKind kind = NodeKind::Action;
    std::uint32_t ordinal = 0;  // original action index (Action nodes only)
    std::int32_t prev = -1;
    std::int32_t next = -1;
    bool alive = false;
  };

  NodeList() = default;
  static NodeList from_actions(const ActionSequence& sequence,
                               const FeatureRegistry& registry);
  static NodeList from_token_sets(const std::vector<std::vector<TokenId>>& sets);

  std::int32_t head() const { return head_; }
  std::int32_t tail() const { return tail_; }
  const Node& node(std::int32_t id) const { return arena_[static_cast<std::size_t>(id)]; }
  Node& node(std::int32_t id) { return arena_[static_cast<std::size_t>(id)]; }

  std::size_t live_nodes() const { return live_; }
  std::size_t token_count() const;
  std::uint32_t original_actions() const { return original_actions_; }

  std::int32_t insert_after(std::int32_t pos, Node n);  // pos == -1 inserts at head
  void unlink(std::int32_t id);

  // Node contents in list order; the canonical form used to compare corpora.
  using Snapshot = std::vector<std::pair<NodeKind, std::vector<TokenId>>>;
  Snapshot snapshot() const;

 private:
  std::vector<Node> arena_;
  std::int32_t head_ = -1;
  std::int32_t tail_ = -1;
  std::size_t live_ = 0;
  std::uint32_t original_actions_ = 0;
};

using NodeCorpus = std::vector<NodeList>;

NodeCorpus tokenize_corpus(const Corpus& corpus, const FeatureRegistry& registry);

// Structural checks: list integrity, no empty node, intermediates hold
// exactly one token, and each stretch of intermediates fits inside the
// original action boundaries it bridges (at most one per boundary).
// Throws InternalError on the first violation.
void validate_structure(const NodeList& list);
void validate_structure(const NodeCorpus& corpus);

// In-node membership helpers (tokens stay sorted).
bool node_contains(const NodeList::Node& n, TokenId token);
void node_erase(NodeList::Node& n, TokenId token);
void node_insert(NodeList::Node& n, TokenId token);

}  // namespace actionpiece
