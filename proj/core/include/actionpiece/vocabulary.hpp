#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "actionpiece/corpus.hpp"
#include "actionpiece/types.hpp"

namespace actionpiece {

// (left, right) -> result. Ledger order is priority: a smaller index wins
// during segmentation. result == initial_count + index always holds.
struct MergeRule {
  TokenId left = 0;
  TokenId right = 0;
  TokenId result = 0;
  std::uint32_t index = 0;

  friend bool operator==(const MergeRule&, const MergeRule&) = default;
};

class Vocabulary {
 public:
  Vocabulary() = default;
  explicit Vocabulary(std::uint32_t initial_count, Weight scale = 1);

  std::uint32_t initial_count() const { return initial_count_; }
  std::size_t size() const { return initial_count_ + rules_.size(); }
  Weight scale() const { return scale_; }
  void set_scale(Weight scale) { scale_ = scale; }

  const std::vector<MergeRule>& rules() const { return rules_; }
  bool is_initial(TokenId token) const { return token < initial_count_; }
  bool contains(TokenId token) const { return token < size(); }

  const MergeRule& rule_for(TokenId result) const;
  MergeRule add_rule(TokenId left, TokenId right);

  // Lowest rule index whose (left, right) matches, if any.
  std::optional<std::uint32_t> find_rule(TokenId left, TokenId right) const;

  // Appends the initial tokens the given token expands to (left before right).
  void expand_to_initial(TokenId token, std::vector<TokenId>& out) const;

  friend bool operator==(const Vocabulary& a, const Vocabulary& b) {
    return a.initial_count_ == b.initial_count_ && a.scale_ == b.scale_ &&
           a.rules_ == b.rules_;
  }

 private:
  std::uint32_t initial_count_ = 0;
  Weight scale_ = 1;
  std::vector<MergeRule> rules_;
  std::unordered_map<std::uint64_t, std::uint32_t> rule_index_;
};

// One token per registered feature, empty ledger.
Vocabulary initial_vocabulary(const FeatureRegistry& registry);

// Text format, versioned:
//   actionpiece-vocab v1 initial=<n> rules=<k> scale=<S>
//   index<TAB>left<TAB>right<TAB>result
void save_vocabulary(const Vocabulary& vocab, const std::string& path);
Vocabulary load_vocabulary(const std::string& path);

}  // namespace actionpiece
