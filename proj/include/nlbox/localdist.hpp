#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "nlbox/anf.hpp"
#include "nlbox/box.hpp"
#include "nlbox/errors.hpp"
#include "nlbox/rational.hpp"
#include "nlbox/simplex.hpp"

namespace nlbox {

/// Deterministic local strategy: party i answers bit x of strategies[i] on input x.
struct LocalVertex {
  std::vector<std::uint8_t> strategies;  ///< per party: bit0 = output on input 0, bit1 = output on input 1

  int parties() const { return static_cast<int>(strategies.size()); }

  Bits output(Bits x) const {
    Bits a = 0;
    for (std::size_t i = 0; i < strategies.size(); ++i) {
      if ((strategies[i] >> ((x >> i) & 1U)) & 1U) a |= Bits{1} << i;
    }
    return a;
  }

  /// Position in enumerate_vertices order.
  std::size_t index() const {
    std::size_t v = 0;
    for (std::size_t i = 0; i < strategies.size(); ++i) v |= std::size_t{strategies[i]} << (2 * i);
    return v;
  }

  static LocalVertex from_index(int n, std::size_t v) {
    LocalVertex out;
    out.strategies.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) out.strategies[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>((v >> (2 * i)) & 3U);
    return out;
  }
};

/// All 4^n deterministic local strategies; party 1 varies fastest.
inline std::vector<LocalVertex> enumerate_vertices(int n) {
  require_party_count(n);
  const std::size_t count = std::size_t{1} << (2 * n);
  std::vector<LocalVertex> out;
  out.reserve(count);
  for (std::size_t v = 0; v < count; ++v) out.push_back(LocalVertex::from_index(n, v));
  return out;
}

inline ConditionalBox vertex_box(const LocalVertex& v) {
  const int n = v.parties();
  const std::size_t side = std::size_t{1} << n;
  std::vector<Rational> table(side * side);
  for (Bits x = 0; x < side; ++x) table[x * side + v.output(x)] = 1;
  return ConditionalBox::from_table(n, std::move(table));
}

struct DistanceCertificate {
  /// Unnormalized L1 distance: sum over every input row and output entry.
  Rational distance;
  /// Mixture weights (vertex index, weight) of the closest local box found.
  std::vector<std::pair<std::size_t, Rational>> primal_weights;
  /// Dual prices y per table entry (x * 2^n + a), each in [-1, 1].
  std::vector<Rational> dual_entry_prices;
  /// Dual price of the normalization constraint; equals -max_v sum_x y[x, v(x)].
  Rational dual_offset;
  ConditionalBox closest_box;
  std::size_t simplex_iterations = 0;
};

struct DistanceOptions {
  int max_parties = 5;
  /// Vertex columns added per pricing round; 0 puts every vertex in the first master.
  std::size_t column_batch = 64;
  SimplexOptions simplex;
};

namespace detail {

inline Rational dual_vertex_value(const std::vector<Rational>& prices, const LocalVertex& v, std::size_t side) {
  Rational total = 0;
  for (Bits x = 0; x < side; ++x) total += prices[x * side + v.output(x)];
  return total;
}

// Rows are the support entries of P plus normalization. Since every input row of P and of a
// local box sums to one, sum_e |P_e - L_e| = 2 sum_{P_e > 0} (P_e - L_e)^+, so
//   min 2 sum u_e  s.t.  L_e + u_e - w_e = P_e (P_e > 0),  sum lambda = 1.
struct SupportMaster {
  std::size_t side = 0;
  std::vector<std::size_t> support;  // entry per row
  std::vector<std::size_t> row_of;   // entry -> row, or npos

  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

  explicit SupportMaster(const ConditionalBox& b) : side(b.side()), row_of(b.side() * b.side(), npos) {
    for (std::size_t e = 0; e < row_of.size(); ++e) {
      if (sgn(b.table()[e]) > 0) {
        row_of[e] = support.size();
        support.push_back(e);
      }
    }
  }

  std::size_t normalization_row() const { return support.size(); }

  LinearProgram<Rational> program(const ConditionalBox& b, const std::vector<LocalVertex>& vertices,
                                  const std::vector<std::size_t>& active) const {
    LinearProgram<Rational> lp;
    lp.rows = support.size() + 1;
    for (std::size_t e : support) lp.rhs.push_back(b.table()[e]);
    lp.rhs.emplace_back(1);
    for (std::size_t v : active) {
      SparseColumn<Rational> col;
      for (Bits x = 0; x < side; ++x) {
        const std::size_t row = row_of[x * side + vertices[v].output(x)];
        if (row != npos) col.emplace_back(row, Rational(1));
      }
      col.emplace_back(normalization_row(), Rational(1));
      lp.add_column(std::move(col), Rational(0));
    }
    for (std::size_t r = 0; r < support.size(); ++r) {
      lp.add_column({{r, Rational(1)}}, Rational(2));
      lp.add_column({{r, Rational(-1)}}, Rational(0));
    }
    return lp;
  }

  // Reduced cost of a vertex column under row prices `duals`.
  Rational reduced_cost(const std::vector<Rational>& duals, const LocalVertex& v) const {
    Rational r = -duals[normalization_row()];
    for (Bits x = 0; x < side; ++x) {
      const std::size_t row = row_of[x * side + v.output(x)];
      if (row != npos) r -= duals[row];
    }
    return r;
  }
};

}  // namespace detail

/// Exact L1 distance from `b` to the local polytope, with primal and dual certificates:
///   min sum_e t_e  s.t.  |P_e - sum_v lambda_v D_v(e)| <= t_e,  lambda >= 0,  sum lambda = 1.
/// Vertex columns are priced in batches until no vertex has negative reduced cost; the final
/// dual is checked against every one of the 4^n vertices.
inline DistanceCertificate l1_distance_to_local(const ConditionalBox& b, const DistanceOptions& options = {}) {
  const int n = b.parties();
  if (n > options.max_parties) {
    throw DomainError("distance LP for " + std::to_string(n) + " parties exceeds the cap of " +
                      std::to_string(options.max_parties));
  }
  const std::size_t side = b.side();
  const std::size_t entries = side * side;
  const std::vector<LocalVertex> vertices = enumerate_vertices(n);
  const detail::SupportMaster master(b);

  std::vector<std::size_t> active;
  std::vector<bool> is_active(vertices.size(), false);
  if (options.column_batch == 0) {
    for (std::size_t v = 0; v < vertices.size(); ++v) active.push_back(v);
  } else {
    active.push_back(0);
  }
  for (std::size_t v : active) is_active[v] = true;

  LpSolution<Rational> sol;
  std::size_t iterations = 0;
  for (;;) {
    sol = solve_lp(master.program(b, vertices, active), options.simplex);
    iterations += sol.iterations;
    if (sol.status != LpStatus::kOptimal) throw Error("distance LP did not reach an optimum");
    std::vector<std::pair<Rational, std::size_t>> entering;
    for (std::size_t v = 0; v < vertices.size(); ++v) {
      if (is_active[v]) continue;
      Rational r = master.reduced_cost(sol.duals, vertices[v]);
      if (sgn(r) < 0) entering.emplace_back(std::move(r), v);
    }
    if (entering.empty()) break;
    const std::size_t take = std::min(options.column_batch, entering.size());
    std::partial_sort(entering.begin(), entering.begin() + static_cast<std::ptrdiff_t>(take), entering.end());
    for (std::size_t k = 0; k < take; ++k) {
      active.push_back(entering[k].second);
      is_active[entering[k].second] = true;
    }
  }

  DistanceCertificate cert{sol.objective, {}, {}, {}, b, iterations};
  std::vector<std::pair<std::size_t, Rational>> weights;
  std::vector<Rational> closest(entries);
  for (std::size_t k = 0; k < active.size(); ++k) {
    const Rational& w = sol.x[k];
    if (sgn(w) == 0) continue;
    weights.emplace_back(active[k], w);
    for (Bits x = 0; x < side; ++x) closest[x * side + vertices[active[k]].output(x)] += w;
  }
  std::sort(weights.begin(), weights.end());
  cert.primal_weights = std::move(weights);
  cert.closest_box = ConditionalBox::from_table(n, std::move(closest));

  // Master prices y in [0, 2] on the support shift to y - 1 in [-1, 1]; entries outside get -1.
  cert.dual_entry_prices.assign(entries, Rational(-1));
  for (std::size_t r = 0; r < master.support.size(); ++r) cert.dual_entry_prices[master.support[r]] = sol.duals[r] - 1;
  cert.dual_offset = sol.duals[master.normalization_row()] + Rational(static_cast<long>(side));

  // Both certificates are re-checked from the raw tables.
  if (l1_distance(b, cert.closest_box) != cert.distance) throw Error("primal certificate does not reproduce the distance");
  Rational dual_objective = cert.dual_offset;
  for (std::size_t e = 0; e < entries; ++e) {
    const Rational& y = cert.dual_entry_prices[e];
    if (y > 1 || y < -1) throw Error("dual certificate violates the price bounds");
    dual_objective += b.table()[e] * y;
  }
  for (const auto& v : vertices) {
    if (Rational(detail::dual_vertex_value(cert.dual_entry_prices, v, side) + cert.dual_offset) > 0) {
      throw Error("dual certificate is infeasible at a local vertex");
    }
  }
  if (dual_objective != cert.distance) throw Error("duality gap is not zero");
  return cert;
}

struct AffineApproximation {
  /// min over affine g of |{x : f(x) != g(x)}|.
  int mismatches = 0;
  Anf witness;
};

/// Brute force over the 2^{n+1} affine functions c ^ c_1 x_1 ^ ... ^ c_n x_n; the first
/// minimizer in order of the coefficient mask (constant as bit 0) is returned.
inline AffineApproximation nearest_affine_oracle(const Anf& f) {
  const int n = f.variables();
  const TruthTable target = truth_table_from_anf(f);
  AffineApproximation best{static_cast<int>(target.size()) + 1, Anf(n)};
  for (Bits mask = 0; mask < (Bits{1} << (n + 1)); ++mask) {
    const bool constant = mask & 1U;
    const Bits linear = mask >> 1;
    int mismatches = 0;
    for (Bits x = 0; x < target.size(); ++x) {
      const bool g = constant != parity(x & linear);
      mismatches += g != static_cast<bool>(target[x]);
    }
    if (mismatches < best.mismatches) {
      std::vector<Monomial> monomials;
      if (constant) monomials.push_back(0);
      for (int i = 0; i < n; ++i) {
        if (bit(linear, i)) monomials.push_back(Bits{1} << i);
      }
      best = {mismatches, Anf::from_monomials(n, std::move(monomials))};
    }
  }
  return best;
}

}  // namespace nlbox
