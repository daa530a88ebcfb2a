#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "nlbox/wiring.hpp"
#include "oracles.hpp"

using namespace nlbox;

TEST(Wiring, BsWiringRules) {
  const WiringProtocol w = bs_wiring(3);
  ASSERT_EQ(w.parties(), 3);
  for (const auto& r : w.rules) {
    EXPECT_FALSE(r.y(false, false));
    EXPECT_TRUE(r.y(true, false));
    EXPECT_FALSE(r.y(true, true));
    EXPECT_TRUE(r.c(false, true, false));
    EXPECT_FALSE(r.c(true, true, true));
  }
}

TEST(Wiring, ComposeMatchesDirectSum) {
  std::mt19937_64 rng(17);
  for (int n = 2; n <= 4; ++n) {
    for (int k = 0; k < 4; ++k) {
      const ConditionalBox p1 = mix(make_npr(n), make_even_parity(n), oracle::random_unit_rational(rng));
      const ConditionalBox p2 = make_full_correlation(anf_from_truth_table(oracle::random_truth_table(n, rng)));
      EXPECT_EQ(compose_adaptive(p1, p2, bs_wiring(n)), oracle::bs_compose(p1, p2));
    }
  }
  EXPECT_THROW(compose_adaptive(make_npr(2), make_npr(3), bs_wiring(2)), DimensionError);
  EXPECT_THROW(compose_adaptive(make_npr(2), make_npr(2), bs_wiring(3)), DimensionError);
}

TEST(Wiring, FourRelations) {
  for (int n = 2; n <= 5; ++n) {
    const ConditionalBox pr = make_npr(n);
    const ConditionalBox even = make_even_parity(n);
    EXPECT_EQ(oracle::bs_compose(pr, pr), pr);
    EXPECT_EQ(oracle::bs_compose(pr, even), pr);
    EXPECT_EQ(oracle::bs_compose(even, pr), mix(pr, even, Rational(1, 1UL << (n - 1))));
    EXPECT_EQ(oracle::bs_compose(even, even), even);
  }
}

TEST(Wiring, ComposedBoxesStayNonSignaling) {
  std::mt19937_64 rng(23);
  for (int n = 2; n <= 4; ++n) {
    for (int k = 0; k < 3; ++k) {
      const ConditionalBox p1 = make_full_correlation(anf_from_truth_table(oracle::random_truth_table(n, rng)));
      const ConditionalBox p2 = mix(make_npr(n), make_even_parity(n), oracle::random_unit_rational(rng));
      const ConditionalBox c = compose_adaptive(p1, p2, bs_wiring(n));
      EXPECT_TRUE(is_nonsignaling(c));
      EXPECT_TRUE(subset_outputs_uniform(c, n - 1));
    }
  }
}

TEST(Wiring, BuildFromPrsAllThreeVariableFunctions) {
  for (unsigned code = 0; code < 256; ++code) {
    TruthTable t(8);
    for (Bits x = 0; x < 8; ++x) t[x] = static_cast<std::uint8_t>((code >> x) & 1U);
    const Anf f = anf_from_truth_table(t);
    const PrConstruction c = build_from_prs(f);
    EXPECT_EQ(c.box, oracle::full_correlation(3, [&t](Bits x) { return int(t[x]); })) << f.to_string();
    EXPECT_EQ(c.boxes_used, static_cast<int>(f.monomials().size()));
    EXPECT_TRUE(is_nonsignaling(c.box));
  }
}

TEST(Wiring, BuildFromPrsRandomFourAndFive) {
  std::mt19937_64 rng(29);
  for (int n : {4, 5}) {
    for (int k = 0; k < 50; ++k) {
      const TruthTable t = oracle::random_truth_table(n, rng);
      EXPECT_EQ(build_from_prs(anf_from_truth_table(t)).box, oracle::full_correlation(n, [&t](Bits x) { return int(t[x]); }));
    }
  }
}

TEST(Wiring, OnePlusXyPlusXzFromThreePrBoxes) {
  // 1 ^ xy ^ xz from three PR boxes.
  const Anf f = Anf::from_index_lists(3, {{}, {1, 2}, {1, 3}});
  const PrConstruction c = build_from_prs(f);
  EXPECT_EQ(c.boxes_used, 3);
  EXPECT_EQ(c.box, oracle::full_correlation(3, [](Bits x) { return 1 ^ (oracle::bit_of(x, 0) & (oracle::bit_of(x, 1) ^ oracle::bit_of(x, 2))); }));
}

TEST(Wiring, JoinedBoxesRandomInstances) {
  std::mt19937_64 rng(31);
  for (int k = 0; k < 20; ++k) {
    const int n = 3 + static_cast<int>(rng() % 3);
    int k1, k2, k3;
    do {
      k1 = 1 + static_cast<int>(rng() % n);
      k2 = 1 + static_cast<int>(rng() % n);
      k3 = 1 + static_cast<int>(rng() % n);
    } while (!(k1 <= k2 && k2 < k3));
    const Anf g1 = anf_from_truth_table(oracle::random_truth_table(k2, rng));
    const int n2 = n - k1 + 1;
    const ConditionalBox p2 = make_full_correlation(Anf::product(n2, full_mask(k3 - k1 + 1)));
    const ConditionalBox joined = lemma3_compose(make_full_correlation(g1), g1, p2, k1, k2, k3, n);
    const auto g1_lists = g1.index_lists();
    const auto expected = oracle::full_correlation(n, [&](Bits x) {
      int prod = 1;
      for (int i = k1; i <= k3; ++i) prod &= oracle::bit_of(x, i - 1);
      return oracle::evaluate(g1_lists, x & full_mask(k2)) ^ prod;
    });
    EXPECT_EQ(joined, expected) << "n=" << n << " k=" << k1 << "," << k2 << "," << k3 << " g1=" << g1.to_string();
  }
}

TEST(Wiring, JoinedBoxesPreconditions) {
  const Anf g1 = Anf::from_index_lists(2, {{1, 2}});
  const ConditionalBox p1 = make_full_correlation(g1);
  const ConditionalBox p2 = make_full_correlation(Anf::product(2, 0b11));
  EXPECT_EQ(lemma3_compose(p1, g1, p2, 2, 2, 3, 3), make_full_correlation(Anf::from_index_lists(3, {{1, 2}, {2, 3}})));
  EXPECT_THROW(lemma3_compose(p1, g1, p2, 2, 3, 3, 3), DomainError);
  EXPECT_THROW(lemma3_compose(make_npr(2), Anf(2), p2, 2, 2, 3, 3), NotInFamilyError);
  EXPECT_THROW(lemma3_compose(p1, g1, make_even_parity(2), 2, 2, 3, 3), NotInFamilyError);
  const Anf zero(2);
  EXPECT_EQ(lemma3_compose(make_full_correlation(zero), zero, p2, 2, 2, 3, 3),
            make_full_correlation(Anf::from_index_lists(3, {{2, 3}})));
}

TEST(Wiring, XorLocalPart) {
  const Anf f = Anf::from_index_lists(5, {{1, 2, 3}, {1, 4}, {4, 5}, {3}});
  EXPECT_EQ(xor_local_part(make_full_correlation(f), Anf::from_index_lists(5, {{3}})),
            make_full_correlation(Anf::from_index_lists(5, {{1, 2, 3}, {1, 4}, {4, 5}})));
  std::mt19937_64 rng(37);
  for (int k = 0; k < 10; ++k) {
    const Anf g = anf_from_truth_table(oracle::random_truth_table(4, rng));
    const Anf local = strip_local_part(g).local;
    EXPECT_EQ(xor_local_part(make_full_correlation(g), local), make_full_correlation(strip_local_part(g).nonlocal));
  }
  EXPECT_THROW(xor_local_part(make_npr(2), Anf::from_index_lists(2, {{1, 2}})), DomainError);
}

TEST(Wiring, CollapseIsolatesThreePartyMixture) {
  const Anf f = Anf::from_index_lists(5, {{1, 2, 3}, {1, 4}, {4, 5}, {3}});
  const Anf x3 = Anf::from_index_lists(5, {{3}});
  const Rational eps(2, 7);
  const ConditionalBox stripped = xor_local_part(mix(make_full_correlation(f), make_full_correlation(x3), eps), x3);
  const ConditionalBox iso = collapse_parties(stripped, {{4, false}, {5, false}}, {4, 5}, 1);
  EXPECT_EQ(iso, mix(make_npr(3), make_even_parity(3), eps));
  EXPECT_TRUE(is_nonsignaling(iso));
}

TEST(Wiring, CollapseCommutesWithMix) {
  std::mt19937_64 rng(41);
  for (int k = 0; k < 10; ++k) {
    const ConditionalBox a = make_full_correlation(anf_from_truth_table(oracle::random_truth_table(4, rng)));
    const ConditionalBox b = make_full_correlation(anf_from_truth_table(oracle::random_truth_table(4, rng)));
    const Rational eps = oracle::random_unit_rational(rng);
    const std::map<int, bool> constants{{2, bool(rng() & 1U)}, {4, bool(rng() & 1U)}};
    const std::set<int> absorbed{2, 4};
    EXPECT_EQ(collapse_parties(mix(a, b, eps), constants, absorbed, 3),
              mix(collapse_parties(a, constants, absorbed, 3), collapse_parties(b, constants, absorbed, 3), eps));
  }
  EXPECT_THROW(collapse_parties(make_npr(3), {{2, false}}, {2}, 2), DomainError);
  EXPECT_THROW(collapse_parties(make_npr(3), {}, {2}, 1), DomainError);
  EXPECT_THROW(collapse_parties(make_npr(3), {{1, false}, {2, false}}, {2}, 3), DomainError);
}

TEST(Wiring, XorEmbedded) {
  const Rational eps(3, 5);
  const ConditionalBox sub = mix(make_npr(3), make_even_parity(3), eps);
  const Anf rest = Anf::from_index_lists(5, {{1, 4}, {4, 5}, {3}});
  const Anf f = rest ^ Anf::from_index_lists(5, {{1, 2, 3}});
  EXPECT_EQ(xor_embedded(sub, {1, 2, 3}, make_full_correlation(rest)),
            mix(make_full_correlation(f), make_full_correlation(rest), eps));
  EXPECT_THROW(xor_embedded(sub, {3, 2, 1}, make_full_correlation(rest)), DomainError);
}

TEST(Wiring, MonteCarloChiSquareWithinThreeSigma) {
  const std::size_t samples = 100000;
  std::mt19937_64 rng(20240601);
  const Anf f = Anf::from_index_lists(5, {{1, 2, 3}, {1, 4}, {4, 5}, {3}});
  const std::vector<std::pair<ConditionalBox, Bits>> pairs{
      {make_npr(2), 0b11},
      {make_npr(3), 0b111},
      {make_even_parity(3), 0b101},
      {mix(make_npr(2), make_even_parity(2), Rational(1, 3)), 0b11},
      {mix(make_npr(3), make_even_parity(3), Rational(1, 10)), 0b111},
      {mix(make_npr(4), make_even_parity(4), Rational(5, 7)), 0b1011},
      {make_full_correlation(f), 0b10110},
      {compose_adaptive(mix(make_npr(2), make_even_parity(2), Rational(1, 2)), make_npr(2), bs_wiring(2)), 0b01},
      {make_full_correlation(Anf::from_index_lists(3, {{}, {1, 2}, {1, 3}})), 0b011},
      {mix(make_full_correlation(f), make_full_correlation(Anf::from_index_lists(5, {{3}})), Rational(1, 4)), 0b11111},
  };
  for (const auto& [b, x] : pairs) {
    std::vector<std::size_t> counts(b.side());
    for (std::size_t k = 0; k < samples; ++k) ++counts[sample(b, x, rng)];
    EXPECT_LE(oracle::chi_square_z(b, x, counts), 3.0) << "n=" << b.parties() << " x=" << x;
  }
}

TEST(Wiring, ChiSquareRejectsAWrongDistribution) {
  std::mt19937_64 rng(11);
  const ConditionalBox drawn = mix(make_npr(3), make_even_parity(3), Rational(3, 10));
  std::vector<std::size_t> counts(8);
  for (int k = 0; k < 100000; ++k) ++counts[sample(drawn, 0b111, rng)];
  EXPECT_LE(oracle::chi_square_z(drawn, 0b111, counts), 3.0);
  EXPECT_GT(oracle::chi_square_z(mix(make_npr(3), make_even_parity(3), Rational(1, 3)), 0b111, counts), 3.0);
  EXPECT_EQ(oracle::chi_square_z(make_even_parity(3), 0b111, counts), std::numeric_limits<double>::infinity());
}

TEST(Wiring, SamplingIsSeeded) {
  const ConditionalBox b = make_npr(3);
  EXPECT_EQ(sample(b, 5, std::uint64_t{99}), sample(b, 5, std::uint64_t{99}));
  EXPECT_THROW(sample(b, 8, std::uint64_t{1}), DomainError);
}
