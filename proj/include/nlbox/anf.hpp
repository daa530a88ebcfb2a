#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "nlbox/bits.hpp"
#include "nlbox/errors.hpp"
#include "nlbox/union_find.hpp"

namespace nlbox {

/// An AND-monomial as a variable mask; the empty mask is the constant 1.
using Monomial = Bits;

/// Truth table of an n-variable function, entry x (x_1 least significant) holding 0 or 1.
using TruthTable = std::vector<std::uint8_t>;

/// Lexicographic order of the ascending 1-based index lists.
inline bool monomial_less(Monomial a, Monomial b) {
  while (a != 0 && b != 0) {
    const int la = std::countr_zero(a);
    const int lb = std::countr_zero(b);
    if (la != lb) return la < lb;
    a &= a - 1;
    b &= b - 1;
  }
  return a == 0 && b != 0;
}

/// Boolean function as an XOR of AND-monomials over GF(2).
class Anf {
 public:
  Anf() = default;

  explicit Anf(int variables) : variables_(variables) { require_party_count(variables); }

  static Anf from_monomials(int variables, std::vector<Monomial> monomials) {
    Anf f(variables);
    for (Monomial m : monomials) {
      if ((m & ~full_mask(variables)) != 0) {
        throw DomainError("monomial uses a variable beyond x" + std::to_string(variables));
      }
    }
    std::sort(monomials.begin(), monomials.end(), monomial_less);
    if (std::adjacent_find(monomials.begin(), monomials.end()) != monomials.end()) {
      throw DomainError("duplicate monomial in ANF");
    }
    f.monomials_ = std::move(monomials);
    return f;
  }

  /// 1-based index lists; the empty list is the constant term.
  static Anf from_index_lists(int variables, const std::vector<std::vector<int>>& lists) {
    std::vector<Monomial> monomials;
    monomials.reserve(lists.size());
    for (const auto& list : lists) {
      Monomial m = 0;
      for (int i : list) {
        if (i < 1 || i > variables) {
          throw DomainError("variable index " + std::to_string(i) + " outside 1.." + std::to_string(variables));
        }
        const Monomial b = Monomial{1} << (i - 1);
        if (m & b) throw DomainError("repeated variable index " + std::to_string(i) + " in a monomial");
        m |= b;
      }
      monomials.push_back(m);
    }
    return from_monomials(variables, std::move(monomials));
  }

  static Anf constant(int variables, bool value) {
    Anf f(variables);
    if (value) f.monomials_.push_back(0);
    return f;
  }

  /// Product of the variables in `mask` (1 when the mask is empty).
  static Anf product(int variables, Monomial mask) { return from_monomials(variables, {mask}); }

  int variables() const { return variables_; }
  const std::vector<Monomial>& monomials() const { return monomials_; }
  bool empty() const { return monomials_.empty(); }

  bool contains(Monomial m) const {
    return std::binary_search(monomials_.begin(), monomials_.end(), m, monomial_less);
  }

  int degree() const {
    int d = 0;
    for (Monomial m : monomials_) d = std::max(d, popcount(m));
    return d;
  }

  bool evaluate(Bits x) const {
    bool v = false;
    for (Monomial m : monomials_) v ^= ((x & m) == m);
    return v;
  }

  /// Symmetric difference of the monomial sets.
  friend Anf operator^(const Anf& a, const Anf& b) {
    if (a.variables_ != b.variables_) throw DimensionError("XOR of ANFs with different variable counts");
    Anf out(a.variables_);
    std::set_symmetric_difference(a.monomials_.begin(), a.monomials_.end(), b.monomials_.begin(),
                                  b.monomials_.end(), std::back_inserter(out.monomials_), monomial_less);
    return out;
  }

  friend bool operator==(const Anf&, const Anf&) = default;

  std::vector<std::vector<int>> index_lists() const {
    std::vector<std::vector<int>> out;
    out.reserve(monomials_.size());
    for (Monomial m : monomials_) out.push_back(indices_of(m));
    return out;
  }

  /// Human-readable form such as "x1x2x3 ^ x1x4 ^ x3".
  std::string to_string() const {
    if (monomials_.empty()) return "0";
    std::string s;
    for (Monomial m : monomials_) {
      if (!s.empty()) s += " ^ ";
      if (m == 0) {
        s += "1";
        continue;
      }
      for (int i : indices_of(m)) s += "x" + std::to_string(i);
    }
    return s;
  }

 private:
  int variables_ = 0;
  std::vector<Monomial> monomials_;  // sorted by monomial_less, duplicate-free
};

namespace detail {

// In-place GF(2) Moebius transform; it is its own inverse.
inline void moebius_in_place(TruthTable& t) {
  for (std::size_t step = 1; step < t.size(); step <<= 1) {
    for (std::size_t i = 0; i < t.size(); ++i) {
      if (i & step) t[i] ^= t[i ^ step];
    }
  }
}

}  // namespace detail

inline Anf anf_from_truth_table(const TruthTable& table) {
  const std::size_t len = table.size();
  if (len < 2 || (len & (len - 1)) != 0) {
    throw DomainError("truth table length " + std::to_string(len) + " is not a power of two >= 2");
  }
  const int n = std::countr_zero(len);
  require_party_count(n);
  TruthTable coeffs = table;
  for (auto v : coeffs) {
    if (v > 1) throw DomainError("truth table entries must be 0 or 1");
  }
  detail::moebius_in_place(coeffs);
  std::vector<Monomial> monomials;
  for (std::size_t i = 0; i < len; ++i) {
    if (coeffs[i]) monomials.push_back(static_cast<Monomial>(i));
  }
  return Anf::from_monomials(n, std::move(monomials));
}

inline TruthTable truth_table_from_anf(const Anf& f) {
  TruthTable t(std::size_t{1} << f.variables(), 0);
  for (Monomial m : f.monomials()) t[m] = 1;
  detail::moebius_in_place(t);
  return t;
}

/// The degree >= 2 monomials of a function and their overlap structure.
struct MonomialStructure {
  int variables = 0;
  /// Monomials with coefficient 1 and at least two variables, lexicographic.
  std::vector<Monomial> nonlocal;
  /// Connected components of the "shares a variable" graph on `nonlocal`.
  std::vector<std::vector<Monomial>> components;
  /// Per monomial of `nonlocal` (same order): number of its variables that no other member uses.
  std::vector<int> exclusive_counts;
  Bits support = 0;

  int component_count() const { return static_cast<int>(components.size()); }

  int exclusive_count(Monomial m) const {
    const auto it = std::find(nonlocal.begin(), nonlocal.end(), m);
    if (it == nonlocal.end()) throw DomainError("monomial is not part of the non-local set");
    return exclusive_counts[static_cast<std::size_t>(it - nonlocal.begin())];
  }

  /// Variables of `m` used by no other member.
  Bits exclusive_variables(Monomial m) const {
    Bits others = 0;
    for (Monomial k : nonlocal) {
      if (k != m) others |= k;
    }
    return m & ~others;
  }

  int max_exclusive_count() const {
    int best = 0;
    for (int c : exclusive_counts) best = std::max(best, c);
    return best;
  }

  int support_size() const { return popcount(support); }
};

inline MonomialStructure monomial_structure(const Anf& f) {
  MonomialStructure s;
  s.variables = f.variables();
  for (Monomial m : f.monomials()) {
    if (popcount(m) >= 2) s.nonlocal.push_back(m);
  }
  const std::size_t count = s.nonlocal.size();

  // Union each monomial with a per-variable anchor: members sharing a variable end up together.
  const std::size_t vars = static_cast<std::size_t>(s.variables);
  DisjointSets sets(count + vars);
  for (std::size_t k = 0; k < count; ++k) {
    for (int i : indices_of(s.nonlocal[k])) sets.unite(k, count + static_cast<std::size_t>(i - 1));
    s.support |= s.nonlocal[k];
  }
  std::map<std::size_t, std::size_t> slot;  // root -> component index, in order of first member
  for (std::size_t k = 0; k < count; ++k) {
    const auto [it, inserted] = slot.try_emplace(sets.find(k), s.components.size());
    if (inserted) s.components.emplace_back();
    s.components[it->second].push_back(s.nonlocal[k]);
  }

  s.exclusive_counts.reserve(count);
  for (Monomial m : s.nonlocal) s.exclusive_counts.push_back(popcount(s.exclusive_variables(m)));
  return s;
}

struct AnfSplit {
  Anf nonlocal;  ///< monomials of degree >= 2
  Anf local;     ///< constant and single-variable monomials
};

inline AnfSplit strip_local_part(const Anf& f) {
  std::vector<Monomial> high, low;
  for (Monomial m : f.monomials()) (popcount(m) >= 2 ? high : low).push_back(m);
  return {Anf::from_monomials(f.variables(), std::move(high)), Anf::from_monomials(f.variables(), std::move(low))};
}

}  // namespace nlbox
