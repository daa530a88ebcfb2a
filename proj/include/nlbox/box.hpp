#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "nlbox/anf.hpp"
#include "nlbox/bits.hpp"
#include "nlbox/errors.hpp"
#include "nlbox/rational.hpp"

namespace nlbox {

/// Exact conditional distribution P(a|x) of an n-party box with one input bit and
/// one output bit per party. Immutable after construction; rows sum to one exactly.
class ConditionalBox {
 public:
  /// `table[x * 2^n + a]` holds P(a|x). Validates shape, non-negativity and normalization.
  static ConditionalBox from_table(int parties, std::vector<Rational> table) {
    require_party_count(parties);
    const std::size_t side = std::size_t{1} << parties;
    if (table.size() != side * side) {
      throw DimensionError("box table for " + std::to_string(parties) + " parties needs " +
                           std::to_string(side * side) + " entries, got " + std::to_string(table.size()));
    }
    for (std::size_t x = 0; x < side; ++x) {
      Rational sum = 0;
      for (std::size_t a = 0; a < side; ++a) {
        Rational& p = table[x * side + a];
        p.canonicalize();
        if (sgn(p) < 0) {
          throw DomainError("negative probability at input " + to_bitstring(static_cast<Bits>(x), parties));
        }
        sum += p;
      }
      if (sum != 1) {
        throw DomainError("row for input " + to_bitstring(static_cast<Bits>(x), parties) + " sums to " +
                          nlbox::to_string(sum));
      }
    }
    return ConditionalBox(parties, std::move(table));
  }

  int parties() const { return parties_; }
  std::size_t side() const { return std::size_t{1} << parties_; }

  const Rational& prob(Bits a, Bits x) const { return table_[static_cast<std::size_t>(x) * side() + a]; }

  std::span<const Rational> row(Bits x) const {
    return std::span<const Rational>(table_).subspan(static_cast<std::size_t>(x) * side(), side());
  }

  const std::vector<Rational>& table() const { return table_; }

  std::size_t support_size(Bits x) const {
    std::size_t n = 0;
    for (const auto& p : row(x)) n += sgn(p) != 0;
    return n;
  }

  friend bool operator==(const ConditionalBox& a, const ConditionalBox& b) {
    return a.parties_ == b.parties_ && a.table_ == b.table_;
  }

 private:
  ConditionalBox(int parties, std::vector<Rational> table) : parties_(parties), table_(std::move(table)) {}

  int parties_ = 0;
  std::vector<Rational> table_;
};

inline bool box_equal(const ConditionalBox& a, const ConditionalBox& b) { return a == b; }

inline void require_same_parties(const ConditionalBox& a, const ConditionalBox& b, const char* what) {
  if (a.parties() != b.parties()) {
    throw DimensionError(std::string(what) + ": party counts differ (" + std::to_string(a.parties()) + " vs " +
                         std::to_string(b.parties()) + ")");
  }
}

/// P(a|x) = 1/2^{n-1} when the XOR of all outputs equals f(x), else 0.
inline ConditionalBox make_full_correlation(const Anf& f) {
  const int n = f.variables();
  require_party_count(n);
  const TruthTable tt = truth_table_from_anf(f);
  const std::size_t side = std::size_t{1} << n;
  const Rational weight = pow2(-(n - 1));
  std::vector<Rational> table(side * side);
  for (std::size_t x = 0; x < side; ++x) {
    for (std::size_t a = 0; a < side; ++a) {
      if (parity(static_cast<Bits>(a)) == static_cast<bool>(tt[x])) table[x * side + a] = weight;
    }
  }
  return ConditionalBox::from_table(n, std::move(table));
}

/// n-partite PR box: output parity equals the product of all inputs.
inline ConditionalBox make_npr(int n) {
  require_party_count(n);
  return make_full_correlation(Anf::product(n, full_mask(n)));
}

/// Even-parity box: output parity is 0 for every input.
inline ConditionalBox make_even_parity(int n) { return make_full_correlation(Anf(n)); }

inline void require_unit_interval(const Rational& epsilon, const char* what) {
  if (sgn(epsilon) < 0 || epsilon > 1) {
    throw DomainError(std::string(what) + ": epsilon " + to_string(epsilon) + " outside [0,1]");
  }
}

/// epsilon * b1 + (1 - epsilon) * b2, entrywise.
inline ConditionalBox mix(const ConditionalBox& b1, const ConditionalBox& b2, const Rational& epsilon) {
  require_same_parties(b1, b2, "mix");
  require_unit_interval(epsilon, "mix");
  const Rational rest = 1 - epsilon;
  std::vector<Rational> table(b1.table().size());
  for (std::size_t i = 0; i < table.size(); ++i) table[i] = epsilon * b1.table()[i] + rest * b2.table()[i];
  return ConditionalBox::from_table(b1.parties(), std::move(table));
}

/// A member epsilon * target + (1 - epsilon) * local of a two-component family.
struct NoiseFamilyMember {
  ConditionalBox target;
  ConditionalBox local;
  Rational epsilon;

  ConditionalBox realized() const { return mix(target, local, epsilon); }
};

/// Marginal of the outputs in `subset` given the full input x, indexed by (a & subset).
inline std::vector<Rational> marginal(const ConditionalBox& b, Bits subset, Bits x) {
  std::vector<Rational> out(b.side());
  const auto r = b.row(x);
  for (std::size_t a = 0; a < r.size(); ++a) {
    if (sgn(r[a]) != 0) out[a & subset] += r[a];
  }
  return out;
}

/// First witness of signaling: the marginal on `subset` differs between the two inputs,
/// which agree on `subset`. Masks use bit i for party i+1.
struct SignalingViolation {
  Bits subset = 0;
  Bits input = 0;
  Bits other_input = 0;
};

inline std::optional<SignalingViolation> find_signaling(const ConditionalBox& b) {
  const int n = b.parties();
  const Bits all = full_mask(n);
  for (Bits subset = 1; subset < all; ++subset) {
    for (Bits x = 0; x <= all; ++x) {
      const Bits reference = x & subset;
      if (reference == x) continue;
      if (marginal(b, subset, x) != marginal(b, subset, reference)) return SignalingViolation{subset, reference, x};
    }
  }
  return std::nullopt;
}

inline bool is_nonsignaling(const ConditionalBox& b) { return !find_signaling(b).has_value(); }

/// True iff every subset of at most k parties sees uniformly random outputs for every input.
inline bool subset_outputs_uniform(const ConditionalBox& b, int k) {
  const int n = b.parties();
  if (k < 1 || k > n - 1) {
    throw DomainError("subset size " + std::to_string(k) + " outside 1.." + std::to_string(n - 1));
  }
  const Bits all = full_mask(n);
  for (Bits subset = 1; subset < all; ++subset) {
    const int size = popcount(subset);
    if (size > k) continue;
    const Rational uniform = pow2(-size);
    for (Bits x = 0; x <= all; ++x) {
      const auto m = marginal(b, subset, x);
      for (Bits a = 0; a <= all; ++a) {
        if ((a & subset) == a && m[a] != uniform) return false;
      }
    }
  }
  return true;
}

/// The unique epsilon with b = epsilon * target + (1 - epsilon) * local, checked entrywise.
inline Rational decompose_epsilon(const ConditionalBox& b, const ConditionalBox& target, const ConditionalBox& local) {
  require_same_parties(b, target, "decompose_epsilon");
  require_same_parties(b, local, "decompose_epsilon");
  std::optional<Rational> epsilon;
  const auto& t = target.table();
  const auto& l = local.table();
  const auto& v = b.table();
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (t[i] != l[i]) {
      epsilon = Rational(v[i] - l[i]) / Rational(t[i] - l[i]);
      break;
    }
  }
  if (!epsilon) throw NotInFamilyError("not in family: target and local components coincide");
  if (sgn(*epsilon) < 0 || *epsilon > 1) throw NotInFamilyError("not in family: coefficient outside [0,1]");
  const Rational rest = 1 - *epsilon;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (v[i] != *epsilon * t[i] + rest * l[i]) throw NotInFamilyError("not in family: entrywise mismatch");
  }
  return *epsilon;
}

/// Sum over all inputs and outputs of the absolute entry differences.
inline Rational l1_distance(const ConditionalBox& a, const ConditionalBox& b) {
  require_same_parties(a, b, "l1_distance");
  Rational total = 0;
  for (std::size_t i = 0; i < a.table().size(); ++i) total += abs(a.table()[i] - b.table()[i]);
  return total;
}

}  // namespace nlbox
