#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace actionpiece {

using FeatureId = std::uint64_t;
using TokenId = std::uint32_t;
using SeqIndex = std::uint32_t;

// Co-occurrence weights are exact scaled integers: every contribution is
// 2*S/|A| or S/(|A|*|A'|) with S chosen at load time so both stay integral.
// 128 bits leave headroom for corpus-wide accumulation.
using Weight = unsigned __int128;
using SignedWeight = __int128;

struct TokenPair {
  TokenId left = 0;
  TokenId right = 0;

  friend bool operator==(const TokenPair&, const TokenPair&) = default;
  friend auto operator<=>(const TokenPair&, const TokenPair&) = default;
};

constexpr std::uint64_t pack_pair(TokenId left, TokenId right) {
  return (static_cast<std::uint64_t>(left) << 32) | right;
}

constexpr std::uint64_t pack_pair(const TokenPair& p) {
  return pack_pair(p.left, p.right);
}

constexpr TokenPair unpack_pair(std::uint64_t key) {
  return TokenPair{static_cast<TokenId>(key >> 32),
                   static_cast<TokenId>(key & 0xffffffffu)};
}

std::string to_string(Weight value);
Weight weight_from_string(const std::string& text);

struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InternalError : std::logic_error {
  using std::logic_error::logic_error;
};

}  // namespace actionpiece
