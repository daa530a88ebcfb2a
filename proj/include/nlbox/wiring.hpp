#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "nlbox/anf.hpp"
#include "nlbox/box.hpp"
#include "nlbox/errors.hpp"
#include "nlbox/rational.hpp"

namespace nlbox {

/// Local rule of one party when two boxes are used in sequence.
struct PartyRule {
  /// y = second_input[x | a << 1]
  std::array<bool, 4> second_input{};
  /// c = output[x | a << 1 | b << 2]
  std::array<bool, 8> output{};

  template <class G, class H>
  static PartyRule from(G&& g, H&& h) {
    PartyRule r;
    for (int i = 0; i < 4; ++i) r.second_input[i] = g(bool(i & 1), bool(i & 2));
    for (int i = 0; i < 8; ++i) r.output[i] = h(bool(i & 1), bool(i & 2), bool(i & 4));
    return r;
  }

  bool y(bool x, bool a) const { return second_input[unsigned(x) | unsigned(a) << 1]; }
  bool c(bool x, bool a, bool b) const { return output[unsigned(x) | unsigned(a) << 1 | unsigned(b) << 2]; }

  friend bool operator==(const PartyRule&, const PartyRule&) = default;
};

/// Adaptive two-box wiring: party i feeds y_i = g_i(x_i, a_i) to the second box and
/// outputs c_i = h_i(x_i, a_i, b_i). Rules only see the party's own bits.
struct WiringProtocol {
  std::vector<PartyRule> rules;

  int parties() const { return static_cast<int>(rules.size()); }
};

/// y_i = x_i (1 - a_i), c_i = a_i XOR b_i for every party.
inline WiringProtocol bs_wiring(int n) {
  require_party_count(n);
  const auto rule = PartyRule::from([](bool x, bool a) { return x && !a; },
                                    [](bool, bool a, bool b) { return a != b; });
  return WiringProtocol{std::vector<PartyRule>(static_cast<std::size_t>(n), rule)};
}

/// Exact output distribution of the wiring applied to b1 (first) and b2 (second).
inline ConditionalBox compose_adaptive(const ConditionalBox& b1, const ConditionalBox& b2, const WiringProtocol& w) {
  require_same_parties(b1, b2, "compose_adaptive");
  if (w.parties() != b1.parties()) throw DimensionError("compose_adaptive: wiring party count differs from boxes");
  const int n = b1.parties();
  const std::size_t side = b1.side();
  std::vector<Rational> table(side * side);
  Rational term;
  for (Bits x = 0; x < side; ++x) {
    const auto first = b1.row(x);
    for (Bits a = 0; a < side; ++a) {
      if (sgn(first[a]) == 0) continue;
      Bits y = 0;
      for (int i = 0; i < n; ++i) {
        if (w.rules[i].y(bit(x, i), bit(a, i))) y |= Bits{1} << i;
      }
      const auto second = b2.row(y);
      for (Bits b = 0; b < side; ++b) {
        if (sgn(second[b]) == 0) continue;
        Bits c = 0;
        for (int i = 0; i < n; ++i) {
          if (w.rules[i].c(bit(x, i), bit(a, i), bit(b, i))) c |= Bits{1} << i;
        }
        term = first[a] * second[b];
        table[x * side + c] += term;
      }
    }
  }
  return ConditionalBox::from_table(n, std::move(table));
}

namespace detail {

// Outputs of two independent boxes used on the same inputs are XORed per party.
inline std::vector<Rational> xor_convolve(std::span<const Rational> lhs, std::span<const Rational> rhs) {
  std::vector<Rational> out(lhs.size());
  Rational term;
  for (std::size_t a = 0; a < lhs.size(); ++a) {
    if (sgn(lhs[a]) == 0) continue;
    for (std::size_t b = 0; b < rhs.size(); ++b) {
      if (sgn(rhs[b]) == 0) continue;
      term = lhs[a] * rhs[b];
      out[a ^ b] += term;
    }
  }
  return out;
}

}  // namespace detail

struct PrConstruction {
  ConditionalBox box;
  /// Number of n-PR boxes consumed, one per monomial (local monomials included).
  int boxes_used = 0;
};

/// Realizes the full-correlation box of f from one n-PR box per monomial I: party i feeds
/// x_i when i is in I and the constant 1 otherwise, and outputs the XOR of its box outputs.
inline PrConstruction build_from_prs(const Anf& f) {
  const int n = f.variables();
  const ConditionalBox pr = make_npr(n);
  const std::size_t side = pr.side();
  const Bits all = full_mask(n);
  if (f.empty()) {
    // No PR box is needed; shared randomness yields the even-parity box.
    return {make_even_parity(n), 0};
  }
  std::vector<Rational> table;
  table.reserve(side * side);
  for (Bits x = 0; x < side; ++x) {
    std::vector<Rational> acc(side);
    acc[0] = 1;
    for (Monomial m : f.monomials()) {
      const Bits fed = (x & m) | (all & ~m);
      acc = detail::xor_convolve(acc, pr.row(fed));
    }
    for (auto& p : acc) table.push_back(std::move(p));
  }
  return {ConditionalBox::from_table(n, std::move(table)), static_cast<int>(f.monomials().size())};
}

/// Joins a full-correlation box on parties 1..k2 (function g1) with one on parties k1..n
/// (product of x_k1..x_k3): parties below k1 output a_i, parties k1..k2 output a_i XOR b_i,
/// parties above k2 output b_i. Indices are 1-based; 1 <= k1 <= k2 < k3 <= n.
inline ConditionalBox lemma3_compose(const ConditionalBox& p1, const Anf& g1, const ConditionalBox& p2, int k1,
                                     int k2, int k3, int n) {
  require_party_count(n);
  if (!(1 <= k1 && k1 <= k2 && k2 < k3 && k3 <= n)) {
    throw DomainError("lemma3_compose: need 1 <= k1 <= k2 < k3 <= n, got k1=" + std::to_string(k1) +
                      " k2=" + std::to_string(k2) + " k3=" + std::to_string(k3) + " n=" + std::to_string(n));
  }
  const int n2 = n - k1 + 1;
  if (p1.parties() != k2 || g1.variables() != k2) throw DimensionError("lemma3_compose: first box must span parties 1..k2");
  if (p2.parties() != n2) throw DimensionError("lemma3_compose: second box must span parties k1..n");
  if (p1 != make_full_correlation(g1)) throw NotInFamilyError("lemma3_compose: first box is not the full-correlation box of g1");
  const Monomial product = full_mask(k3 - k1 + 1);
  if (p2 != make_full_correlation(Anf::product(n2, product))) {
    throw NotInFamilyError("lemma3_compose: second box is not the full-correlation box of x_k1...x_k3");
  }

  const std::size_t side = std::size_t{1} << n;
  const Bits low_mask = full_mask(k2);
  std::vector<Rational> table(side * side);
  Rational term;
  for (Bits x = 0; x < side; ++x) {
    const Bits x1 = x & low_mask;
    const Bits x2 = x >> (k1 - 1);
    const auto r1 = p1.row(x1);
    const auto r2 = p2.row(x2);
    for (Bits a = 0; a < r1.size(); ++a) {
      if (sgn(r1[a]) == 0) continue;
      for (Bits b = 0; b < r2.size(); ++b) {
        if (sgn(r2[b]) == 0) continue;
        // a occupies parties 1..k2, b occupies k1..n: XOR realizes all three output cases.
        const Bits c = a ^ (b << (k1 - 1));
        term = r1[a] * r2[b];
        table[x * side + c] += term;
      }
    }
  }
  return ConditionalBox::from_table(n, std::move(table));
}

/// Party 1 XORs the constant term and party i XORs x_i when {i} is a monomial of `local`.
inline ConditionalBox xor_local_part(const ConditionalBox& b, const Anf& local) {
  if (local.variables() != b.parties()) throw DimensionError("xor_local_part: variable count differs from party count");
  Bits constant_flip = 0;
  Bits input_flip = 0;
  for (Monomial m : local.monomials()) {
    if (m == 0) {
      constant_flip = 1;
    } else if (popcount(m) == 1) {
      input_flip |= m;
    } else {
      throw DomainError("xor_local_part: monomial " + Anf::product(local.variables(), m).to_string() + " is not local");
    }
  }
  const std::size_t side = b.side();
  std::vector<Rational> table(side * side);
  for (Bits x = 0; x < side; ++x) {
    const Bits flip = constant_flip ^ (x & input_flip);
    const auto r = b.row(x);
    for (Bits a = 0; a < side; ++a) table[x * side + (a ^ flip)] = r[a];
  }
  return ConditionalBox::from_table(b.parties(), std::move(table));
}

/// Fixes the inputs of the absorbed parties to constants and forwards their outputs to
/// `receiver`, which XORs them into its own output. Party indices are 1-based; the result
/// lists the remaining parties in ascending order.
inline ConditionalBox collapse_parties(const ConditionalBox& b, const std::map<int, bool>& constants,
                                       const std::set<int>& absorbed, int receiver) {
  const int n = b.parties();
  auto check_party = [n](int p) {
    if (p < 1 || p > n) throw DomainError("party " + std::to_string(p) + " outside 1.." + std::to_string(n));
  };
  check_party(receiver);
  if (absorbed.count(receiver)) throw DomainError("collapse_parties: receiver is absorbed");
  Bits absorbed_mask = 0;
  Bits fixed_inputs = 0;
  for (int p : absorbed) {
    check_party(p);
    const auto it = constants.find(p);
    if (it == constants.end()) throw DomainError("collapse_parties: missing constant input for party " + std::to_string(p));
    absorbed_mask |= Bits{1} << (p - 1);
    if (it->second) fixed_inputs |= Bits{1} << (p - 1);
  }
  for (const auto& [p, value] : constants) {
    if (!absorbed.count(p)) throw DomainError("collapse_parties: constant given for non-absorbed party " + std::to_string(p));
  }

  std::vector<int> kept;  // 0-based original indices
  for (int i = 0; i < n; ++i) {
    if (!bit(absorbed_mask, i)) kept.push_back(i);
  }
  const int m = static_cast<int>(kept.size());
  int receiver_slot = 0;
  while (kept[static_cast<std::size_t>(receiver_slot)] != receiver - 1) ++receiver_slot;

  const std::size_t out_side = std::size_t{1} << m;
  std::vector<Rational> table(out_side * out_side);
  for (Bits xr = 0; xr < out_side; ++xr) {
    Bits x = fixed_inputs;
    for (int j = 0; j < m; ++j) {
      if (bit(xr, j)) x |= Bits{1} << kept[static_cast<std::size_t>(j)];
    }
    const auto r = b.row(x);
    for (Bits a = 0; a < r.size(); ++a) {
      if (sgn(r[a]) == 0) continue;
      Bits out = 0;
      for (int j = 0; j < m; ++j) {
        if (bit(a, kept[static_cast<std::size_t>(j)])) out |= Bits{1} << j;
      }
      if (parity(a & absorbed_mask)) out ^= Bits{1} << receiver_slot;
      table[xr * out_side + out] += r[a];
    }
  }
  return ConditionalBox::from_table(m, std::move(table));
}

/// Runs `sub` on the listed parties (1-based, ascending) alongside `full` on all n parties;
/// listed parties output the XOR of both boxes, the others output their `full` bit.
inline ConditionalBox xor_embedded(const ConditionalBox& sub, const std::vector<int>& parties, const ConditionalBox& full) {
  if (static_cast<int>(parties.size()) != sub.parties()) throw DimensionError("xor_embedded: party list size differs from sub-box");
  const int n = full.parties();
  std::vector<Bits> place;
  for (std::size_t j = 0; j < parties.size(); ++j) {
    const int p = parties[j];
    if (p < 1 || p > n || (j > 0 && parties[j - 1] >= p)) throw DomainError("xor_embedded: parties must be ascending within 1..n");
    place.push_back(Bits{1} << (p - 1));
  }
  auto spread = [&place](Bits local) {
    Bits v = 0;
    for (std::size_t j = 0; j < place.size(); ++j) {
      if (bit(local, static_cast<int>(j))) v |= place[j];
    }
    return v;
  };
  const std::size_t side = full.side();
  std::vector<Rational> table;
  table.reserve(side * side);
  std::vector<Rational> lifted(side);
  for (Bits x = 0; x < side; ++x) {
    Bits xs = 0;
    for (std::size_t j = 0; j < place.size(); ++j) {
      if (x & place[j]) xs |= Bits{1} << j;
    }
    std::fill(lifted.begin(), lifted.end(), Rational(0));
    const auto r = sub.row(xs);
    for (Bits a = 0; a < r.size(); ++a) lifted[spread(a)] = r[a];
    for (auto& p : detail::xor_convolve(lifted, full.row(x))) table.push_back(std::move(p));
  }
  return ConditionalBox::from_table(n, std::move(table));
}

/// Draws an output vector from P(.|x). Uses an exact integer draw when the common
/// denominator of the row fits in 64 bits, and double weights otherwise.
inline Bits sample(const ConditionalBox& b, Bits x, std::mt19937_64& rng) {
  if (x >= b.side()) throw DomainError("sample: input outside the box's input range");
  const auto r = b.row(x);
  mpz_class common = 1;
  for (const auto& p : r) mpz_lcm(common.get_mpz_t(), common.get_mpz_t(), p.get_den_mpz_t());
  if (mpz_fits_ulong_p(common.get_mpz_t()) && common.get_ui() > 0) {
    const unsigned long total = common.get_ui();
    std::uniform_int_distribution<unsigned long> draw(0, total - 1);
    unsigned long u = draw(rng);
    for (Bits a = 0; a < r.size(); ++a) {
      const mpz_class share = r[a].get_num() * (common / r[a].get_den());
      const unsigned long w = share.get_ui();
      if (u < w) return a;
      u -= w;
    }
  }
  std::vector<double> weights;
  weights.reserve(r.size());
  for (const auto& p : r) weights.push_back(p.get_d());
  std::discrete_distribution<Bits> draw(weights.begin(), weights.end());
  return draw(rng);
}

inline Bits sample(const ConditionalBox& b, Bits x, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return sample(b, x, rng);
}

}  // namespace nlbox
