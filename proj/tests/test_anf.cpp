#include <gtest/gtest.h>

#include <random>

#include "nlbox/anf.hpp"
#include "oracles.hpp"

using namespace nlbox;

namespace {

// Coefficient of monomial m is the XOR of f over the inputs below m (subset sum over GF(2)).
TruthTable anf_coefficients_oracle(const TruthTable& t) {
  TruthTable c(t.size());
  for (Bits m = 0; m < t.size(); ++m) {
    int acc = 0;
    for (Bits x = 0; x < t.size(); ++x) {
      if ((x & m) == x) acc ^= t[x];
    }
    c[m] = static_cast<std::uint8_t>(acc);
  }
  return c;
}

void expect_round_trip(const TruthTable& t, int n) {
  const Anf f = anf_from_truth_table(t);
  ASSERT_EQ(f.variables(), n);
  EXPECT_EQ(truth_table_from_anf(f), t);
  const TruthTable coeffs = anf_coefficients_oracle(t);
  for (Bits m = 0; m < t.size(); ++m) EXPECT_EQ(f.contains(m), coeffs[m] == 1) << "monomial mask " << m;
  for (Bits x = 0; x < t.size(); ++x) EXPECT_EQ(f.evaluate(x), oracle::evaluate(f.index_lists(), x) == 1);
}

}  // namespace

TEST(Anf, MoebiusRoundTripAllSmallFunctions) {
  for (int n = 1; n <= 3; ++n) {
    const std::size_t side = std::size_t{1} << n;
    for (unsigned code = 0; code < (1U << side); ++code) {
      TruthTable t(side);
      for (std::size_t x = 0; x < side; ++x) t[x] = static_cast<std::uint8_t>((code >> x) & 1U);
      expect_round_trip(t, n);
    }
  }
}

TEST(Anf, MoebiusRoundTripRandomFourAndFive) {
  std::mt19937_64 rng(20240611);
  for (int n : {4, 5}) {
    for (int k = 0; k < 200; ++k) expect_round_trip(oracle::random_truth_table(n, rng), n);
  }
}

TEST(Anf, ExampleFunctionCoefficients) {
  TruthTable t(32);
  const std::vector<std::vector<int>> ms{{1, 2, 3}, {1, 4}, {4, 5}, {3}};
  for (Bits x = 0; x < 32; ++x) t[x] = static_cast<std::uint8_t>(oracle::evaluate(ms, x));
  const Anf f = anf_from_truth_table(t);
  EXPECT_EQ(f.index_lists(), (std::vector<std::vector<int>>{{1, 2, 3}, {1, 4}, {3}, {4, 5}}));
  EXPECT_EQ(f.to_string(), "x1x2x3 ^ x1x4 ^ x3 ^ x4x5");
}

TEST(Anf, XorIsSymmetricDifference) {
  const Anf a = Anf::from_index_lists(3, {{1, 2}, {3}, {}});
  const Anf b = Anf::from_index_lists(3, {{3}, {2, 3}});
  EXPECT_EQ((a ^ b).to_string(), "1 ^ x1x2 ^ x2x3");
  EXPECT_TRUE((a ^ a).empty());
  EXPECT_EQ(Anf(3).to_string(), "0");
}

TEST(Anf, RejectsBadMonomials) {
  EXPECT_THROW(Anf::from_index_lists(3, {{4}}), DomainError);
  EXPECT_THROW(Anf::from_index_lists(3, {{1, 1}}), DomainError);
  EXPECT_THROW(Anf::from_index_lists(3, {{1, 2}, {2, 1}}), DomainError);
}

TEST(MonomialStructure, ExampleFunction) {
  const MonomialStructure s = monomial_structure(Anf::from_index_lists(5, {{1, 2, 3}, {1, 4}, {4, 5}, {3}}));
  ASSERT_EQ(s.nonlocal, (std::vector<Monomial>{0b00111, 0b01001, 0b11000}));
  EXPECT_EQ(s.component_count(), 1);
  // m_I = |I minus the union of the other members|: {2,3}, {}, {5}.
  EXPECT_EQ(s.exclusive_counts, (std::vector<int>{2, 0, 1}));
  EXPECT_EQ(s.support, Bits{0b11111});
  EXPECT_EQ(s.support_size(), 5);
  EXPECT_EQ(s.max_exclusive_count(), 2);
}

TEST(MonomialStructure, DisjointGroups) {
  const MonomialStructure s = monomial_structure(Anf::from_index_lists(4, {{1, 2}, {3, 4}}));
  EXPECT_EQ(s.component_count(), 2);
  EXPECT_EQ(s.exclusive_counts, (std::vector<int>{2, 2}));

  const MonomialStructure chain = monomial_structure(Anf::from_index_lists(6, {{1, 2}, {2, 3}, {5, 6}, {3, 4}}));
  EXPECT_EQ(chain.component_count(), 2);
}

TEST(MonomialStructure, PropertiesOnRandomFunctions) {
  std::mt19937_64 rng(7);
  for (int k = 0; k < 300; ++k) {
    const int n = 2 + static_cast<int>(rng() % 5);
    const Anf f = anf_from_truth_table(oracle::random_truth_table(n, rng));
    const MonomialStructure s = monomial_structure(f);
    Bits all = 0;
    int total_exclusive = 0;
    for (std::size_t i = 0; i < s.nonlocal.size(); ++i) {
      all |= s.nonlocal[i];
      EXPECT_GE(popcount(s.nonlocal[i]), 2);
      EXPECT_LE(s.exclusive_counts[i], popcount(s.nonlocal[i]));
      total_exclusive += s.exclusive_counts[i];
      // Exclusive variables occur in exactly one member.
      for (int v : indices_of(s.exclusive_variables(s.nonlocal[i]))) {
        int hits = 0;
        for (Monomial m : s.nonlocal) hits += bit(m, v - 1);
        EXPECT_EQ(hits, 1);
      }
    }
    EXPECT_EQ(all, s.support);
    EXPECT_LE(total_exclusive, s.support_size());
    // Components partition J and no two components share a variable.
    std::size_t members = 0;
    for (std::size_t c = 0; c < s.components.size(); ++c) {
      members += s.components[c].size();
      for (std::size_t d = c + 1; d < s.components.size(); ++d) {
        Bits uc = 0, ud = 0;
        for (Monomial m : s.components[c]) uc |= m;
        for (Monomial m : s.components[d]) ud |= m;
        EXPECT_EQ(uc & ud, 0U);
      }
    }
    EXPECT_EQ(members, s.nonlocal.size());
  }
}

TEST(AnfSplit, StripsDegreeOneAndConstant) {
  const AnfSplit split = strip_local_part(Anf::from_index_lists(5, {{1, 2, 3}, {1, 4}, {4, 5}, {3}}));
  EXPECT_EQ(split.nonlocal.to_string(), "x1x2x3 ^ x1x4 ^ x4x5");
  EXPECT_EQ(split.local.to_string(), "x3");
}
