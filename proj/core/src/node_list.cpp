#include "actionpiece/node_list.hpp"

#include <algorithm>

namespace actionpiece {

bool node_contains(const NodeList::Node& n, TokenId token) {
  return std::binary_search(n.tokens.begin(), n.tokens.end(), token);
}

void node_erase(NodeList::Node& n, TokenId token) {
  auto it = std::lower_bound(n.tokens.begin(), n.tokens.end(), token);
  if (it == n.tokens.end() || *it != token)
    throw InternalError("node_erase: token not present");
  n.tokens.erase(it);
}

void node_insert(NodeList::Node& n, TokenId token) {
  auto it = std::lower_bound(n.tokens.begin(), n.tokens.end(), token);
  if (it != n.tokens.end() && *it == token)
    throw InternalError("node_insert: token already present");
  n.tokens.insert(it, token);
}

NodeList NodeList::from_actions(const ActionSequence& sequence,
                                const FeatureRegistry& registry) {
  NodeList list;
  list.original_actions_ = static_cast<std::uint32_t>(sequence.actions.size());
  list.arena_.reserve(sequence.actions.size());
  std::int32_t prev = -1;
  for (std::size_t a = 0; a < sequence.actions.size(); ++a) {
    Node n;
    n.kind = NodeKind::Action;
    n.ordinal = static_cast<std::uint32_t>(a);
    n.tokens.reserve(sequence.actions[a].size());
    for (FeatureId f : sequence.actions[a]) n.tokens.push_back(registry.require(f));
    std::sort(n.tokens.begin(), n.tokens.end());
    prev = list.insert_after(prev, std::move(n));
  }
  return list;
}

NodeList NodeList::from_token_sets(const std::vector<std::vector<TokenId>>& sets) {
  NodeList list;
  list.original_actions_ = static_cast<std::uint32_t>(sets.size());
  std::int32_t prev = -1;
  for (std::size_t a = 0; a < sets.size(); ++a) {
    Node n;
    n.kind = NodeKind::Action;
    n.ordinal = static_cast<std::uint32_t>(a);
    n.tokens = sets[a];
    std::sort(n.tokens.begin(), n.tokens.end());
    prev = list.insert_after(prev, std::move(n));
  }
  return list;
}

std::size_t NodeList::token_count() const {
  std::size_t n = 0;
  for (std::int32_t id = head_; id != -1; id = node(id).next) n += node(id).tokens.size();
  return n;
}

std::int32_t NodeList::insert_after(std::int32_t pos, Node n) {
  const std::int32_t id = static_cast<std::int32_t>(arena_.size());
  n.alive = true;
  if (pos == -1) {
    n.prev = -1;
    n.next = head_;
    if (head_ != -1) node(head_).prev = id;
    head_ = id;
    if (tail_ == -1) tail_ = id;
  } else {
    Node& at = node(pos);
    n.prev = pos;
    n.next = at.next;
    if (at.next != -1) node(at.next).prev = id;
    at.next = id;
    if (tail_ == pos) tail_ = id;
  }
  arena_.push_back(std::move(n));
  ++live_;
  return id;
}

void NodeList::unlink(std::int32_t id) {
  Node& n = node(id);
  if (!n.alive) throw InternalError("unlink: node already dead");
  if (n.prev != -1) node(n.prev).next = n.next;
  else head_ = n.next;
  if (n.next != -1) node(n.next).prev = n.prev;
  else tail_ = n.prev;
  n.alive = false;
  n.prev = n.next = -1;
  n.tokens.clear();
  n.tokens.shrink_to_fit();
  --live_;
}

NodeList::Snapshot NodeList::snapshot() const {
  Snapshot snap;
  snap.reserve(live_);
  for (std::int32_t id = head_; id != -1; id = node(id).next)
    snap.emplace_back(node(id).kind, node(id).tokens);
  return snap;
}

NodeCorpus tokenize_corpus(const Corpus& corpus, const FeatureRegistry& registry) {
  NodeCorpus out;
  out.reserve(corpus.sequences.size());
  for (const auto& seq : corpus.sequences)
    out.push_back(NodeList::from_actions(seq, registry));
  return out;
}

void validate_structure(const NodeList& list) {
  std::int32_t prev = -1;
  std::size_t seen = 0;
  // Pending intermediates since the last surviving action node; each run
  // must fit within the original boundaries available between its flanking
  // surviving actions (one intermediate per boundary at most).
  std::size_t run = 0;
  std::int64_t last_action_ordinal = -1;
  bool any_action = false;
  for (std::int32_t id = list.head(); id != -1; id = list.node(id).next) {
    const auto& n = list.node(id);
    if (!n.alive) throw InternalError("structure: dead node linked into list");
    if (n.prev != prev) throw InternalError("structure: broken prev link");
    if (n.tokens.empty()) throw InternalError("structure: empty node");
    if (!std::is_sorted(n.tokens.begin(), n.tokens.end()))
      throw InternalError("structure: node tokens not sorted");
    if (std::adjacent_find(n.tokens.begin(), n.tokens.end()) != n.tokens.end())
      throw InternalError("structure: duplicate token in node");
    if (n.kind == NodeKind::Intermediate) {
      if (n.tokens.size() != 1)
        throw InternalError("structure: intermediate node with " +
                            std::to_string(n.tokens.size()) + " tokens");
      ++run;
    } else {
      const std::int64_t ordinal = n.ordinal;
      const std::int64_t boundaries =
          any_action ? ordinal - last_action_ordinal : ordinal;
      if (static_cast<std::int64_t>(run) > boundaries)
        throw InternalError("structure: " + std::to_string(run) +
                            " intermediates across " + std::to_string(boundaries) +
                            " action boundaries");
      run = 0;
      last_action_ordinal = ordinal;
      any_action = true;
    }
    prev = id;
    ++seen;
  }
  if (prev != list.tail()) throw InternalError("structure: tail link mismatch");
  if (seen != list.live_nodes()) throw InternalError("structure: live node count mismatch");
  if (seen == 0) throw InternalError("structure: empty sequence");
  const std::int64_t trailing_boundaries =
      any_action ? static_cast<std::int64_t>(list.original_actions()) - 1 - last_action_ordinal
                 : static_cast<std::int64_t>(list.original_actions()) - 1;
  if (static_cast<std::int64_t>(run) > trailing_boundaries)
    throw InternalError("structure: trailing intermediates exceed boundaries");
}

void validate_structure(const NodeCorpus& corpus) {
  for (const auto& list : corpus) validate_structure(list);
}

}  // namespace actionpiece
