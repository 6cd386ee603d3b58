#include "actionpiece/types.hpp"

#include <algorithm>

namespace actionpiece {

std::string to_string(Weight value) {
  if (value == 0) return "0";
  std::string digits;
  while (value > 0) {
    digits.push_back(static_cast<char>('0' + static_cast<int>(value % 10)));
    value /= 10;
  }
  std::reverse(digits.begin(), digits.end());
  return digits;
}

Weight weight_from_string(const std::string& text) {
  if (text.empty()) throw DataError("empty integer field");
  Weight value = 0;
  for (char c : text) {
    if (c < '0' || c > '9') throw DataError("invalid integer: '" + text + "'");
    const Weight next = value * 10 + static_cast<unsigned>(c - '0');
    if (next < value) throw DataError("integer overflow: '" + text + "'");
    value = next;
  }
  return value;
}

}  // namespace actionpiece
