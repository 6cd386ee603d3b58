#include "actionpiece/vocabulary.hpp"

#include <fstream>
#include <sstream>

namespace actionpiece {

Vocabulary::Vocabulary(std::uint32_t initial_count, Weight scale)
    : initial_count_(initial_count), scale_(scale) {}

const MergeRule& Vocabulary::rule_for(TokenId result) const {
  if (result < initial_count_ || result >= size())
    throw DataError("token id " + std::to_string(result) + " is not a merged token");
  return rules_[result - initial_count_];
}

MergeRule Vocabulary::add_rule(TokenId left, TokenId right) {
  const TokenId result = static_cast<TokenId>(size());
  if (left >= result || right >= result)
    throw ValidationError("merge rule operands must already be in the vocabulary");
  MergeRule rule{left, right, result, static_cast<std::uint32_t>(rules_.size())};
  rules_.push_back(rule);
  rule_index_.emplace(pack_pair(left, right), rule.index);  // keeps the first (lowest) index
  return rule;
}

std::optional<std::uint32_t> Vocabulary::find_rule(TokenId left, TokenId right) const {
  auto it = rule_index_.find(pack_pair(left, right));
  if (it == rule_index_.end()) return std::nullopt;
  return it->second;
}

void Vocabulary::expand_to_initial(TokenId token, std::vector<TokenId>& out) const {
  if (!contains(token))
    throw DataError("token id " + std::to_string(token) + " outside vocabulary of size " +
                    std::to_string(size()));
  // Explicit stack: ledger chains can be deep.
  std::vector<TokenId> stack{token};
  while (!stack.empty()) {
    const TokenId t = stack.back();
    stack.pop_back();
    if (is_initial(t)) {
      out.push_back(t);
      continue;
    }
    const MergeRule& rule = rules_[t - initial_count_];
    stack.push_back(rule.right);  // left expands first
    stack.push_back(rule.left);
  }
}

Vocabulary initial_vocabulary(const FeatureRegistry& registry) {
  if (registry.empty()) throw ValidationError("cannot build a vocabulary from an empty registry");
  return Vocabulary(static_cast<std::uint32_t>(registry.size()));
}

void save_vocabulary(const Vocabulary& vocab, const std::string& path) {
  std::ostringstream out;
  out << "actionpiece-vocab v1 initial=" << vocab.initial_count()
      << " rules=" << vocab.rules().size() << " scale=" << to_string(vocab.scale()) << "\n";
  for (const MergeRule& r : vocab.rules())
    out << r.index << '\t' << r.left << '\t' << r.right << '\t' << r.result << "\n";
  atomic_write_text(path, out.str());
}

namespace {

std::uint64_t parse_header_field(const std::string& token, const std::string& key,
                                 const std::string& path) {
  const std::string prefix = key + "=";
  if (token.rfind(prefix, 0) != 0)
    throw DataError(path + ": malformed vocabulary header, expected " + key + "=<n>");
  return static_cast<std::uint64_t>(weight_from_string(token.substr(prefix.size())));
}

}  // namespace

Vocabulary load_vocabulary(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open vocabulary file: " + path);
  std::string header;
  if (!std::getline(in, header)) throw DataError(path + ": empty vocabulary file");
  if (!header.empty() && header.back() == '\r') header.pop_back();

  std::istringstream hs(header);
  std::string magic, version, initial_tok, rules_tok, scale_tok;
  hs >> magic >> version >> initial_tok >> rules_tok >> scale_tok;
  if (magic != "actionpiece-vocab")
    throw DataError(path + ": not a vocabulary file (bad magic '" + magic + "')");
  if (version != "v1")
    throw DataError(path + ": unsupported vocabulary version '" + version + "'");
  const std::uint64_t initial = parse_header_field(initial_tok, "initial", path);
  const std::uint64_t rule_count = parse_header_field(rules_tok, "rules", path);
  const std::string scale_prefix = "scale=";
  if (scale_tok.rfind(scale_prefix, 0) != 0)
    throw DataError(path + ": malformed vocabulary header, expected scale=<n>");
  const Weight scale = weight_from_string(scale_tok.substr(scale_prefix.size()));

  Vocabulary vocab(static_cast<std::uint32_t>(initial), scale);
  std::string line;
  std::size_t line_no = 1;
  std::size_t seen = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::uint64_t index, left, right, result;
    if (!(ls >> index >> left >> right >> result))
      throw DataError(path + ":" + std::to_string(line_no) + ": malformed rule line");
    if (index != seen)
      throw DataError(path + ":" + std::to_string(line_no) + ": rule index " +
                      std::to_string(index) + " out of order, expected " + std::to_string(seen));
    if (result != initial + index)
      throw DataError(path + ":" + std::to_string(line_no) + ": rule result id " +
                      std::to_string(result) + " must equal initial+index = " +
                      std::to_string(initial + index));
    if (left >= result || right >= result)
      throw DataError(path + ":" + std::to_string(line_no) +
                      ": rule references token id not yet defined");
    vocab.add_rule(static_cast<TokenId>(left), static_cast<TokenId>(right));
    ++seen;
  }
  if (seen != rule_count)
    throw DataError(path + ": header declares " + std::to_string(rule_count) +
                    " rules but file contains " + std::to_string(seen));
  return vocab;
}

}  // namespace actionpiece
