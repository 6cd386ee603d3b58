#include "actionpiece/construction.hpp"

namespace actionpiece {

// One left-to-right pass. At each node: first merge (left, right) if both sit
// inside it, then check the ordered cross match with the successor node.
// Cross merges between two action nodes insert an intermediate holding the
// result; when one side is an intermediate the result replaces its token; two
// adjacent intermediates collapse into one. Action nodes emptied by a merge
// are removed from the list. The result token is always newer than both
// operands, so nodes created or retokenized during the pass can never match
// the rule again and the pass terminates.
std::size_t apply_merge(NodeList& list, const MergeRule& rule, const MergeOptions& options) {
  const TokenId u = rule.left;
  const TokenId v = rule.right;
  const TokenId w = rule.result;
  if (u >= w || v >= w) throw ValidationError("merge rule result must be newer than operands");

  std::size_t merges = 0;
  std::int32_t cur = list.head();
  while (cur != -1) {
    if (u != v) {
      NodeList::Node& cn = list.node(cur);
      if (cn.tokens.size() >= 2 && node_contains(cn, u) && node_contains(cn, v)) {
        node_erase(cn, u);
        node_erase(cn, v);
        node_insert(cn, w);
        ++merges;
      }
    }

    const std::int32_t nxt = list.node(cur).next;
    std::int32_t advance = nxt;
    if (options.context_aware && nxt != -1 && node_contains(list.node(cur), u) &&
        node_contains(list.node(nxt), v)) {
      const NodeKind left_kind = list.node(cur).kind;
      const NodeKind right_kind = list.node(nxt).kind;
      if (left_kind == NodeKind::Action && right_kind == NodeKind::Action) {
        NodeList::Node inter;
        inter.kind = NodeKind::Intermediate;
        inter.tokens = {w};
        const std::int32_t mid = list.insert_after(cur, std::move(inter));
        node_erase(list.node(cur), u);
        node_erase(list.node(nxt), v);
        if (list.node(cur).tokens.empty()) list.unlink(cur);
        if (list.node(nxt).tokens.empty()) list.unlink(nxt);
        advance = mid;
      } else if (left_kind == NodeKind::Intermediate && right_kind == NodeKind::Intermediate) {
        list.node(cur).tokens = {w};
        list.unlink(nxt);
        advance = list.node(cur).next;
      } else if (left_kind == NodeKind::Intermediate) {
        list.node(cur).tokens = {w};
        node_erase(list.node(nxt), v);
        if (list.node(nxt).tokens.empty()) list.unlink(nxt);
        advance = list.node(cur).next;
      } else {
        list.node(nxt).tokens = {w};
        node_erase(list.node(cur), u);
        if (list.node(cur).tokens.empty()) list.unlink(cur);
        advance = nxt;
      }
      ++merges;
    }
    cur = advance;
  }

  if (options.validate && merges > 0) validate_structure(list);
  return merges;
}

std::size_t apply_merge(NodeCorpus& corpus, const MergeRule& rule, const MergeOptions& options) {
  std::size_t merges = 0;
  for (auto& list : corpus) merges += apply_merge(list, rule, options);
  return merges;
}

}  // namespace actionpiece
