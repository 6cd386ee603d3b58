#include "actionpiece/segmentation.hpp"

#include <algorithm>
#include <fstream>
#include <limits>
#include <sstream>
#include <thread>
#include <unordered_map>

#include "actionpiece/construction.hpp"
#include "actionpiece/node_list.hpp"
#include "actionpiece/rng.hpp"

namespace actionpiece {

SegmentationMode segmentation_mode_from_string(const std::string& name) {
  if (name == "spr") return SegmentationMode::Spr;
  if (name == "naive") return SegmentationMode::Naive;
  throw ValidationError("unknown segmentation mode '" + name + "' (expected spr|naive)");
}

std::string to_string(SegmentationMode mode) {
  return mode == SegmentationMode::Spr ? "spr" : "naive";
}

TokenSequence permute_flatten(const ActionSequence& sequence,
                              const FeatureRegistry& registry, std::uint64_t seed) {
  TokenSequence out;
  out.reserve(sequence.flattened_size());
  for (std::size_t k = 0; k < sequence.actions.size(); ++k) {
    std::vector<TokenId> tokens;
    tokens.reserve(sequence.actions[k].size());
    for (FeatureId f : sequence.actions[k]) tokens.push_back(registry.require(f));
    std::sort(tokens.begin(), tokens.end());
    SplitMix64 rng(mix_seed(seed, k));
    seeded_shuffle(tokens, rng);
    out.insert(out.end(), tokens.begin(), tokens.end());
  }
  return out;
}

TokenSequence bpe_segment(TokenSequence flat, const Vocabulary& vocab) {
  for (TokenId t : flat)
    if (!vocab.contains(t))
      throw DataError("token id " + std::to_string(t) + " outside vocabulary");
  for (;;) {
    std::uint32_t best_index = std::numeric_limits<std::uint32_t>::max();
    std::size_t best_pos = flat.size();
    for (std::size_t i = 0; i + 1 < flat.size(); ++i) {
      const auto rule = vocab.find_rule(flat[i], flat[i + 1]);
      if (rule && *rule < best_index) {
        best_index = *rule;
        best_pos = i;
      }
    }
    if (best_pos == flat.size()) break;
    flat[best_pos] = vocab.rules()[best_index].result;
    flat.erase(flat.begin() + static_cast<std::ptrdiff_t>(best_pos) + 1);
  }
  return flat;
}

TokenSequence spr_encode(const ActionSequence& sequence, const Vocabulary& vocab,
                         const FeatureRegistry& registry, std::uint64_t seed) {
  return bpe_segment(permute_flatten(sequence, registry, seed), vocab);
}

TokenSequence naive_encode(const ActionSequence& sequence, const Vocabulary& vocab,
                           const FeatureRegistry& registry) {
  if (vocab.initial_count() != registry.size())
    throw DataError("vocabulary has " + std::to_string(vocab.initial_count()) +
                    " initial tokens but the registry has " + std::to_string(registry.size()));
  NodeList list = NodeList::from_actions(sequence, registry);

  // Multiplicity of each token across nodes, to skip rules cheaply: a rule
  // can only fire if both operands are present (twice, for a self-pair).
  std::unordered_map<TokenId, std::uint32_t> present;
  for (std::int32_t id = list.head(); id != -1; id = list.node(id).next)
    for (TokenId t : list.node(id).tokens) ++present[t];

  const MergeOptions mopts{};
  for (const MergeRule& rule : vocab.rules()) {
    const auto lu = present.find(rule.left);
    if (lu == present.end() || lu->second == 0) continue;
    const auto rv = present.find(rule.right);
    if (rv == present.end() || rv->second == 0) continue;
    if (rule.left == rule.right && lu->second < 2) continue;
    const std::size_t applied = apply_merge(list, rule, mopts);
    if (applied > 0) {
      present[rule.left] -= static_cast<std::uint32_t>(applied);
      present[rule.right] -= static_cast<std::uint32_t>(applied);
      present[rule.result] += static_cast<std::uint32_t>(applied);
    }
  }

  TokenSequence out;
  out.reserve(list.token_count());
  for (std::int32_t id = list.head(); id != -1; id = list.node(id).next) {
    const auto& tokens = list.node(id).tokens;  // sorted: ascending-id emission
    out.insert(out.end(), tokens.begin(), tokens.end());
  }
  return out;
}

std::vector<TokenId> expand_to_initial(const TokenSequence& tokens, const Vocabulary& vocab) {
  std::vector<TokenId> out;
  out.reserve(tokens.size());
  for (TokenId t : tokens) vocab.expand_to_initial(t, out);
  return out;
}

std::vector<FeatureId> expand(const TokenSequence& tokens, const Vocabulary& vocab,
                              const FeatureRegistry& registry) {
  if (vocab.initial_count() > registry.size())
    throw DataError("vocabulary initial block exceeds feature registry size");
  const std::vector<TokenId> initial = expand_to_initial(tokens, vocab);
  std::vector<FeatureId> features;
  features.reserve(initial.size());
  for (TokenId t : initial) features.push_back(registry.feature_at(t));
  return features;
}

DecodeOutcome decode_item(const TokenSequence& tokens, const Vocabulary& vocab,
                          const FeatureRegistry& registry, const ItemRegistry& items) {
  DecodeOutcome outcome;
  outcome.features = expand(tokens, vocab, registry);
  FeatureSet canonical = outcome.features;
  std::sort(canonical.begin(), canonical.end());
  if (std::adjacent_find(canonical.begin(), canonical.end()) != canonical.end()) {
    outcome.status = DecodeOutcome::Status::InvalidGeneration;
    return outcome;
  }
  if (const auto item = items.resolve(std::move(canonical))) {
    outcome.status = DecodeOutcome::Status::Resolved;
    outcome.item_id = *item;
  } else {
    outcome.status = DecodeOutcome::Status::NotFound;
  }
  return outcome;
}

std::vector<EncodedRecord> encode_batch(const Corpus& corpus, const Vocabulary& vocab,
                                        const FeatureRegistry& registry,
                                        SegmentationMode mode, std::uint64_t epoch_seed,
                                        unsigned threads) {
  std::vector<EncodedRecord> records(corpus.sequences.size());
  const auto encode_range = [&](std::size_t begin, std::size_t end) {
    for (std::size_t s = begin; s < end; ++s) {
      const std::uint64_t seed = mode == SegmentationMode::Spr ? mix_seed(epoch_seed, s) : 0;
      TokenSequence tokens =
          mode == SegmentationMode::Spr
              ? spr_encode(corpus.sequences[s], vocab, registry, seed)
              : naive_encode(corpus.sequences[s], vocab, registry);
      records[s] = EncodedRecord{static_cast<SeqIndex>(s), seed, std::move(tokens)};
    }
  };
  if (threads <= 1 || corpus.sequences.size() < 2 * threads) {
    encode_range(0, corpus.sequences.size());
  } else {
    std::vector<std::thread> workers;
    const std::size_t chunk = (corpus.sequences.size() + threads - 1) / threads;
    for (unsigned t = 0; t < threads; ++t) {
      const std::size_t begin = t * chunk;
      const std::size_t end = std::min(corpus.sequences.size(), begin + chunk);
      if (begin < end) workers.emplace_back(encode_range, begin, end);
    }
    for (auto& w : workers) w.join();
  }
  return records;
}

void save_encoded(const std::vector<EncodedRecord>& records, const std::string& path,
                  const std::vector<std::string>& header_comments) {
  std::ostringstream out;
  for (const auto& comment : header_comments) out << "# " << comment << "\n";
  for (const auto& r : records) {
    out << r.index << '\t' << r.seed << '\t';
    for (std::size_t i = 0; i < r.tokens.size(); ++i) {
      if (i) out << ' ';
      out << r.tokens[i];
    }
    out << "\n";
  }
  atomic_write_text(path, out.str());
}

std::vector<EncodedRecord> load_encoded(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open encoded file: " + path);
  std::vector<EncodedRecord> records;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    EncodedRecord record;
    if (!(ls >> record.index >> record.seed))
      throw DataError(path + ":" + std::to_string(line_no) + ": malformed encoded record");
    TokenId t;
    while (ls >> t) record.tokens.push_back(t);
    if (!ls.eof())
      throw DataError(path + ":" + std::to_string(line_no) + ": malformed token list");
    records.push_back(std::move(record));
  }
  return records;
}

}  // namespace actionpiece
