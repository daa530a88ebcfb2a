#pragma once

#include <bit>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "nlbox/errors.hpp"

namespace nlbox {

/// Bit-vector over parties or variables: bit i holds party/variable i+1.
using Bits = std::uint32_t;

/// Largest supported party count.
inline constexpr int kMaxParties = 8;

inline constexpr Bits full_mask(int n) { return n >= 32 ? ~Bits{0} : (Bits{1} << n) - 1; }

inline constexpr bool bit(Bits v, int i) { return ((v >> i) & 1U) != 0; }

inline constexpr bool parity(Bits v) { return (std::popcount(v) & 1) != 0; }

inline constexpr int popcount(Bits v) { return std::popcount(v); }

/// 1-based indices of the set bits, ascending.
inline std::vector<int> indices_of(Bits v) {
  std::vector<int> out;
  for (int i = 0; v != 0; ++i, v >>= 1) {
    if (v & 1U) out.push_back(i + 1);
  }
  return out;
}

inline Bits mask_of(const std::vector<int>& one_based) {
  Bits m = 0;
  for (int i : one_based) m |= Bits{1} << (i - 1);
  return m;
}

/// Bitstring with party 1 as the leftmost character.
inline std::string to_bitstring(Bits v, int n) {
  std::string s(static_cast<std::size_t>(n), '0');
  for (int i = 0; i < n; ++i) {
    if (bit(v, i)) s[static_cast<std::size_t>(i)] = '1';
  }
  return s;
}

inline Bits parse_bitstring(std::string_view s, int n) {
  if (static_cast<int>(s.size()) != n) {
    throw ParseError("bitstring \"" + std::string(s) + "\" must have length " + std::to_string(n));
  }
  Bits v = 0;
  for (int i = 0; i < n; ++i) {
    const char c = s[static_cast<std::size_t>(i)];
    if (c == '1') {
      v |= Bits{1} << i;
    } else if (c != '0') {
      throw ParseError("bitstring \"" + std::string(s) + "\" contains a character other than 0/1");
    }
  }
  return v;
}

inline void require_party_count(int n) {
  if (n < 1 || n > kMaxParties) {
    throw DomainError("party count " + std::to_string(n) + " outside 1.." + std::to_string(kMaxParties));
  }
}

}  // namespace nlbox
