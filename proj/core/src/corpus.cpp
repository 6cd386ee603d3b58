#include "actionpiece/corpus.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace actionpiece {

std::size_t ActionSequence::flattened_size() const {
  std::size_t n = 0;
  for (const auto& a : actions) n += a.size();
  return n;
}

std::size_t Corpus::total_actions() const {
  std::size_t n = 0;
  for (const auto& s : sequences) n += s.actions.size();
  return n;
}

double Corpus::mean_length() const {
  if (sequences.empty()) return 0.0;
  return static_cast<double>(total_actions()) / static_cast<double>(sequences.size());
}

std::size_t Corpus::max_set_size() const {
  std::size_t m = 0;
  for (const auto& s : sequences)
    for (const auto& a : s.actions) m = std::max(m, a.size());
  return m;
}

TokenId FeatureRegistry::add(FeatureId feature) {
  auto it = index_.find(feature);
  if (it != index_.end()) return it->second;
  const TokenId token = static_cast<TokenId>(features_.size());
  features_.push_back(feature);
  index_.emplace(feature, token);
  return token;
}

std::optional<TokenId> FeatureRegistry::find(FeatureId feature) const {
  auto it = index_.find(feature);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

TokenId FeatureRegistry::require(FeatureId feature) const {
  auto it = index_.find(feature);
  if (it == index_.end())
    throw DataError("unknown feature id " + std::to_string(feature));
  return it->second;
}

FeatureId FeatureRegistry::feature_at(TokenId token) const {
  if (token >= features_.size())
    throw DataError("token id " + std::to_string(token) + " has no registered feature");
  return features_[token];
}

std::size_t ItemRegistry::TupleHash::operator()(const FeatureSet& fs) const {
  std::size_t h = 0x9e3779b97f4a7c15ULL;
  for (FeatureId f : fs) {
    h ^= std::hash<FeatureId>{}(f) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  }
  return h;
}

namespace {

FeatureSet canonicalize(FeatureSet features) {
  std::sort(features.begin(), features.end());
  return features;
}

}  // namespace

void ItemRegistry::add(std::uint64_t item_id, FeatureSet features) {
  if (features.empty()) throw ValidationError("item feature set must be nonempty");
  FeatureSet key = canonicalize(std::move(features));
  if (std::adjacent_find(key.begin(), key.end()) != key.end())
    throw ValidationError("item " + std::to_string(item_id) + " has duplicate features");
  if (by_item_.count(item_id))
    throw ValidationError("duplicate item id " + std::to_string(item_id));
  if (by_tuple_.count(key))
    throw ValidationError("feature tuple of item " + std::to_string(item_id) +
                          " already registered to another item");
  by_tuple_.emplace(key, item_id);
  by_item_.emplace(item_id, std::move(key));
}

std::optional<std::uint64_t> ItemRegistry::resolve(FeatureSet features) const {
  auto it = by_tuple_.find(canonicalize(std::move(features)));
  if (it == by_tuple_.end()) return std::nullopt;
  return it->second;
}

const FeatureSet* ItemRegistry::features_of(std::uint64_t item_id) const {
  auto it = by_item_.find(item_id);
  return it == by_item_.end() ? nullptr : &it->second;
}

std::optional<std::uint64_t> resolve_item(const FeatureSet& features,
                                          const ItemRegistry& registry) {
  return registry.resolve(features);
}

namespace {

struct LineParser {
  const std::string& text;
  std::size_t pos = 0;
  const std::string& source;
  std::size_t line_no;

  [[noreturn]] void fail(const std::string& message) const {
    throw DataError(source + ":" + std::to_string(line_no) + ": " + message);
  }

  void skip_ws() {
    while (pos < text.size() && (text[pos] == ' ' || text[pos] == '\t')) ++pos;
  }

  bool consume(char c) {
    skip_ws();
    if (pos < text.size() && text[pos] == c) {
      ++pos;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!consume(c))
      fail(std::string("expected '") + c + "' at column " + std::to_string(pos + 1));
  }

  FeatureId parse_int() {
    skip_ws();
    if (pos >= text.size() || text[pos] < '0' || text[pos] > '9') {
      if (pos < text.size() && text[pos] == '-') fail("feature ids must be non-negative");
      fail("expected integer at column " + std::to_string(pos + 1));
    }
    FeatureId value = 0;
    while (pos < text.size() && text[pos] >= '0' && text[pos] <= '9') {
      const FeatureId next = value * 10 + static_cast<FeatureId>(text[pos] - '0');
      if (next < value) fail("feature id overflows 64 bits");
      value = next;
      ++pos;
    }
    return value;
  }

  FeatureSet parse_set() {
    expect('[');
    FeatureSet set;
    set.push_back(parse_int());
    while (consume(',')) set.push_back(parse_int());
    expect(']');
    std::sort(set.begin(), set.end());
    if (std::adjacent_find(set.begin(), set.end()) != set.end())
      fail("duplicate feature in action set");
    return set;
  }

  ActionSequence parse_record() {
    ActionSequence seq;
    expect('[');
    skip_ws();
    if (pos < text.size() && text[pos] == ']') fail("empty sequence");
    seq.actions.push_back(parse_set());
    while (consume(',')) seq.actions.push_back(parse_set());
    expect(']');
    skip_ws();
    if (pos != text.size()) fail("trailing characters at column " + std::to_string(pos + 1));
    return seq;
  }
};

bool is_blank_or_comment(const std::string& line) {
  for (char c : line) {
    if (c == '#') return true;
    if (c != ' ' && c != '\t' && c != '\r') return false;
  }
  return true;
}

std::string strip_cr(std::string line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

}  // namespace

Corpus parse_corpus(std::istream& in, FeatureRegistry& registry,
                    const LoadOptions& options, const std::string& source_name) {
  Corpus corpus;
  std::string line;
  std::size_t line_no = 0;
  std::size_t uniform_size = 0;
  while (std::getline(in, line)) {
    ++line_no;
    line = strip_cr(line);
    if (is_blank_or_comment(line)) continue;
    LineParser parser{line, 0, source_name, line_no};
    ActionSequence seq = parser.parse_record();
    for (const auto& action : seq.actions) {
      if (options.strict_uniform_sizes) {
        if (uniform_size == 0) uniform_size = action.size();
        else if (action.size() != uniform_size)
          throw DataError(source_name + ":" + std::to_string(line_no) +
                          ": action set size " + std::to_string(action.size()) +
                          " differs from " + std::to_string(uniform_size) +
                          " (strict uniform-size mode)");
      }
      for (FeatureId f : action) registry.add(f);
    }
    corpus.sequences.push_back(std::move(seq));
  }
  if (corpus.sequences.empty())
    throw DataError(source_name + ": corpus contains no sequences");
  return corpus;
}

Corpus load_corpus(const std::string& path, FeatureRegistry& registry,
                   const LoadOptions& options) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open corpus file: " + path);
  return parse_corpus(in, registry, options, path);
}

void save_corpus(const Corpus& corpus, const std::string& path,
                 const std::vector<std::string>& header_comments) {
  std::ostringstream out;
  for (const auto& comment : header_comments) out << "# " << comment << "\n";
  for (const auto& seq : corpus.sequences) {
    out << '[';
    for (std::size_t a = 0; a < seq.actions.size(); ++a) {
      if (a) out << ',';
      out << '[';
      const auto& set = seq.actions[a];
      for (std::size_t i = 0; i < set.size(); ++i) {
        if (i) out << ',';
        out << set[i];
      }
      out << ']';
    }
    out << "]\n";
  }
  atomic_write_text(path, out.str());
}

FeatureRegistry load_feature_registry(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open feature registry: " + path);
  FeatureRegistry registry;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    line = strip_cr(line);
    if (is_blank_or_comment(line)) continue;
    try {
      const std::size_t before = registry.size();
      const FeatureId f = static_cast<FeatureId>(weight_from_string(line));
      registry.add(f);
      if (registry.size() == before)
        throw DataError("duplicate feature id " + line);
    } catch (const DataError& e) {
      throw DataError(path + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  if (registry.empty()) throw DataError(path + ": empty feature registry");
  return registry;
}

void save_feature_registry(const FeatureRegistry& registry, const std::string& path) {
  std::ostringstream out;
  for (FeatureId f : registry.features()) out << f << "\n";
  atomic_write_text(path, out.str());
}

ItemRegistry load_item_registry(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open item registry: " + path);
  ItemRegistry registry;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    line = strip_cr(line);
    if (is_blank_or_comment(line)) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos)
      throw DataError(path + ":" + std::to_string(line_no) + ": expected item_id<TAB>features");
    try {
      const std::uint64_t item = static_cast<std::uint64_t>(weight_from_string(line.substr(0, tab)));
      FeatureSet features;
      std::string field;
      std::istringstream rest(line.substr(tab + 1));
      while (std::getline(rest, field, ','))
        features.push_back(static_cast<FeatureId>(weight_from_string(field)));
      registry.add(item, std::move(features));
    } catch (const ValidationError& e) {
      throw DataError(path + ":" + std::to_string(line_no) + ": " + e.what());
    } catch (const DataError& e) {
      throw DataError(path + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return registry;
}

void save_item_registry(const ItemRegistry& registry, const std::string& path) {
  std::vector<std::uint64_t> ids;
  ids.reserve(registry.size());
  for (const auto& [id, _] : registry.items()) ids.push_back(id);
  std::sort(ids.begin(), ids.end());
  std::ostringstream out;
  for (std::uint64_t id : ids) {
    out << id << '\t';
    const FeatureSet& fs = *registry.features_of(id);
    for (std::size_t i = 0; i < fs.size(); ++i) {
      if (i) out << ',';
      out << fs[i];
    }
    out << "\n";
  }
  atomic_write_text(path, out.str());
}

void atomic_write_text(const std::string& path, const std::string& contents) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write file: " + tmp.string());
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) throw DataError("write failed: " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp);
    throw DataError("cannot move " + tmp.string() + " into place: " + ec.message());
  }
}

}  // namespace actionpiece
