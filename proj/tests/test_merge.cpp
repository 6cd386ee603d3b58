#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "actionpiece/construction.hpp"
#include "test_helpers.hpp"

using namespace actionpiece;

namespace {

NodeList::Snapshot snap(std::initializer_list<std::pair<NodeKind, std::vector<TokenId>>> nodes) {
  NodeList::Snapshot s;
  for (const auto& n : nodes) s.emplace_back(n.first, n.second);
  return s;
}

constexpr NodeKind A = NodeKind::Action;
constexpr NodeKind I = NodeKind::Intermediate;

}  // namespace

TEST_CASE("merge inside one node replaces the pair with the result") {
  NodeList list = NodeList::from_token_sets({{0, 1, 2}});
  const MergeRule rule{0, 1, 5, 0};
  CHECK(apply_merge(list, rule, {.context_aware = true, .validate = true}) == 1);
  CHECK(list.snapshot() == snap({{A, {2, 5}}}));
}

TEST_CASE("merge across two singleton action nodes leaves one intermediate") {
  NodeList list = NodeList::from_token_sets({{0}, {1}});
  const MergeRule rule{0, 1, 5, 0};
  CHECK(apply_merge(list, rule, {.context_aware = true, .validate = true}) == 1);
  CHECK(list.snapshot() == snap({{I, {5}}}));
}

TEST_CASE("merge across two action nodes inserts an intermediate between them") {
  NodeList list = NodeList::from_token_sets({{0, 2}, {1, 3}});
  const MergeRule rule{0, 1, 5, 0};
  CHECK(apply_merge(list, rule, {.context_aware = true, .validate = true}) == 1);
  CHECK(list.snapshot() == snap({{A, {2}}, {I, {5}}, {A, {3}}}));
}

TEST_CASE("merge with a left intermediate retokenizes it in place") {
  NodeList list = NodeList::from_token_sets({{0, 2}, {1, 3}});
  apply_merge(list, MergeRule{0, 1, 5, 0}, {});
  // [ {2}, I{5}, {3} ]; now merge (5, 3) -> 6
  CHECK(apply_merge(list, MergeRule{5, 3, 6, 1}, {.context_aware = true, .validate = true}) == 1);
  CHECK(list.snapshot() == snap({{A, {2}}, {I, {6}}}));
}

TEST_CASE("merge with a right intermediate retokenizes it in place") {
  NodeList list = NodeList::from_token_sets({{0, 2}, {1, 3}});
  apply_merge(list, MergeRule{0, 1, 5, 0}, {});
  // [ {2}, I{5}, {3} ]; now merge (2, 5) -> 6
  CHECK(apply_merge(list, MergeRule{2, 5, 6, 1}, {.context_aware = true, .validate = true}) == 1);
  CHECK(list.snapshot() == snap({{I, {6}}, {A, {3}}}));
}

TEST_CASE("adjacent intermediates collapse into a single intermediate") {
  // [[0],[1,0],[1]] with rule (0,1)->5 merges twice and leaves two adjacent
  // intermediates; a follow-up rule across them must fuse them into one node.
  NodeList list = NodeList::from_token_sets({{0}, {0, 1}, {1}});
  CHECK(apply_merge(list, MergeRule{0, 1, 5, 0}, {.context_aware = true, .validate = true}) == 2);
  CHECK(list.snapshot() == snap({{I, {5}}, {I, {5}}}));
  CHECK(apply_merge(list, MergeRule{5, 5, 6, 1}, {.context_aware = true, .validate = true}) == 1);
  CHECK(list.snapshot() == snap({{I, {6}}}));
}

TEST_CASE("within-node merge takes precedence at each node") {
  // (0,1) both inside the first node and 1 also at the head of the second:
  // the scan merges inside the node first, which consumes the cross match.
  NodeList list = NodeList::from_token_sets({{0, 1}, {1, 2}});
  CHECK(apply_merge(list, MergeRule{0, 1, 5, 0}, {}) == 1);
  CHECK(list.snapshot() == snap({{A, {5}}, {A, {1, 2}}}));
}

TEST_CASE("leftmost-first, non-overlapping across a chain") {
  // Three singleton {0} nodes, self-pair rule (0,0): only the leftmost two merge.
  NodeList list = NodeList::from_token_sets({{0}, {0}, {0}});
  CHECK(apply_merge(list, MergeRule{0, 0, 5, 0}, {.context_aware = true, .validate = true}) == 1);
  CHECK(list.snapshot() == snap({{I, {5}}, {A, {0}}}));
}

TEST_CASE("merge applies at every disjoint occurrence in one pass") {
  NodeList list = NodeList::from_token_sets({{0, 1}, {0, 1}, {2, 0, 1}});
  CHECK(apply_merge(list, MergeRule{0, 1, 5, 0}, {.context_aware = true, .validate = true}) == 3);
  CHECK(list.snapshot() == snap({{A, {5}}, {A, {5}}, {A, {2, 5}}}));
}

TEST_CASE("no-op when the pair is absent") {
  NodeList list = NodeList::from_token_sets({{0, 2}});
  CHECK(apply_merge(list, MergeRule{0, 1, 5, 0}, {}) == 0);
  CHECK(list.snapshot() == snap({{A, {0, 2}}}));
}

TEST_CASE("context_aware off restricts merges to within nodes") {
  NodeList list = NodeList::from_token_sets({{0}, {1}});
  CHECK(apply_merge(list, MergeRule{0, 1, 5, 0}, {.context_aware = false}) == 0);
  NodeList list2 = NodeList::from_token_sets({{0, 1}});
  CHECK(apply_merge(list2, MergeRule{0, 1, 5, 0}, {.context_aware = false}) == 1);
}

TEST_CASE("cross self-pair requires two instances") {
  NodeList list = NodeList::from_token_sets({{0}, {1}});
  CHECK(apply_merge(list, MergeRule{0, 0, 5, 0}, {}) == 0);
}

TEST_CASE("rule result must be newer than its operands") {
  NodeList list = NodeList::from_token_sets({{0, 1}});
  CHECK_THROWS_AS(apply_merge(list, MergeRule{0, 5, 3, 0}, {}), ValidationError);
}

TEST_CASE("structure validation rejects corrupt intermediates") {
  NodeList list = NodeList::from_token_sets({{0, 1}, {2}});
  apply_merge(list, MergeRule{0, 2, 5, 0}, {});
  // [ {1}, I{5} ]: force a two-token intermediate.
  for (std::int32_t id = list.head(); id != -1; id = list.node(id).next)
    if (list.node(id).kind == NodeKind::Intermediate) node_insert(list.node(id), 7);
  CHECK_THROWS_AS(validate_structure(list), InternalError);
}

TEST_CASE("merged sequences always satisfy the structural invariants") {
  std::size_t universe = 0;
  for (std::uint64_t seed = 100; seed < 140; ++seed) {
    const Corpus corpus = aptest::random_small_corpus(seed, universe);
    const FeatureRegistry registry = aptest::dense_registry(universe);
    ConstructionConfig config;
    config.target_size = static_cast<std::uint32_t>(registry.size()) + 60;
    config.validate_each_merge = true;  // throws on the first violation
    const BuildResult result = build_vocab_naive(corpus, registry, config);
    validate_structure(result.corpus);
  }
}
