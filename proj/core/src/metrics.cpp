#include "actionpiece/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace actionpiece {

double nsl(const std::vector<TokenSequence>& encoded, const Corpus& corpus) {
  if (encoded.size() != corpus.sequences.size())
    throw ValidationError("encoded batch has " + std::to_string(encoded.size()) +
                          " sequences, corpus has " + std::to_string(corpus.sequences.size()));
  if (encoded.empty()) throw ValidationError("nsl of an empty corpus");
  double sum = 0.0;
  for (std::size_t i = 0; i < encoded.size(); ++i) {
    const std::size_t flat = corpus.sequences[i].flattened_size();
    if (flat == 0) throw ValidationError("sequence " + std::to_string(i) + " is empty");
    sum += static_cast<double>(encoded[i].size()) / static_cast<double>(flat);
  }
  return sum / static_cast<double>(encoded.size());
}

UtilizationReport token_utilization(const std::vector<TokenSequence>& encoded,
                                    const Vocabulary& vocab) {
  UtilizationAccumulator acc(vocab);
  acc.add(encoded);
  return acc.report();
}

UtilizationAccumulator::UtilizationAccumulator(const Vocabulary& vocab)
    : seen_(vocab.size(), false) {}

void UtilizationAccumulator::add(const TokenSequence& tokens) {
  for (TokenId t : tokens) {
    if (t >= seen_.size())
      throw DataError("token id " + std::to_string(t) + " outside vocabulary of size " +
                      std::to_string(seen_.size()));
    if (!seen_[t]) {
      seen_[t] = true;
      ++used_;
    }
  }
}

void UtilizationAccumulator::add(const std::vector<TokenSequence>& batch) {
  for (const auto& tokens : batch) add(tokens);
}

UtilizationReport UtilizationAccumulator::report() const {
  return UtilizationReport{used_, seen_.size()};
}

RankedList fuse_rankings(const std::vector<RankedList>& lists) {
  if (lists.empty()) throw ValidationError("fusion requires at least one ranking list");
  std::unordered_map<std::uint64_t, double> sums;
  for (const auto& list : lists) {
    std::unordered_set<std::uint64_t> seen;
    for (const auto& entry : list) {
      if (!std::isfinite(entry.score))
        throw ValidationError("non-finite score for item " + std::to_string(entry.item));
      if (!seen.insert(entry.item).second)
        throw ValidationError("item " + std::to_string(entry.item) +
                              " appears twice in one ranking list");
      sums[entry.item] += entry.score;
    }
  }
  RankedList fused;
  fused.reserve(sums.size());
  const double q = static_cast<double>(lists.size());
  for (const auto& [item, sum] : sums) fused.push_back(RankedEntry{item, sum / q});
  std::sort(fused.begin(), fused.end(), [](const RankedEntry& a, const RankedEntry& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.item < b.item;
  });
  return fused;
}

namespace {

std::size_t rank_of(const RankedList& fused, std::uint64_t truth) {
  for (std::size_t i = 0; i < fused.size(); ++i)
    if (fused[i].item == truth) return i + 1;
  return 0;  // absent
}

}  // namespace

int recall_at_k(const RankedList& fused, std::uint64_t truth, std::size_t k) {
  if (k == 0) throw ValidationError("k must be positive");
  const std::size_t rank = rank_of(fused, truth);
  return rank != 0 && rank <= k ? 1 : 0;
}

double ndcg_at_k(const RankedList& fused, std::uint64_t truth, std::size_t k) {
  if (k == 0) throw ValidationError("k must be positive");
  const std::size_t rank = rank_of(fused, truth);
  if (rank == 0 || rank > k) return 0.0;
  return 1.0 / std::log2(static_cast<double>(rank) + 1.0);
}

RankedList load_ranked_list(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open ranking file: " + path);
  RankedList list;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    RankedEntry entry;
    if (!(ls >> entry.item >> entry.score))
      throw DataError(path + ":" + std::to_string(line_no) +
                      ": expected `item_id<TAB>score`");
    std::string extra;
    if (ls >> extra)
      throw DataError(path + ":" + std::to_string(line_no) + ": trailing fields");
    list.push_back(entry);
  }
  return list;
}

void save_ranked_list(const RankedList& list, const std::string& path,
                      const std::vector<std::string>& header_comments) {
  std::ostringstream out;
  for (const auto& comment : header_comments) out << "# " << comment << "\n";
  out.precision(17);
  for (const auto& entry : list) out << entry.item << '\t' << entry.score << "\n";
  atomic_write_text(path, out.str());
}

}  // namespace actionpiece
