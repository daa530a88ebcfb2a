#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <stdexcept>
#include <type_traits>
#include <string>
#include <utility>
#include <vector>

#include "nlbox/errors.hpp"
#include "nlbox/rational.hpp"

namespace nlbox {

/// Sign and pivot tolerance policy per scalar type.
template <class Scalar>
struct ScalarTraits;

template <>
struct ScalarTraits<Rational> {
  static int sign(const Rational& v) { return sgn(v); }
};

template <>
struct ScalarTraits<double> {
  static constexpr double kTolerance = 1e-9;
  static int sign(double v) { return v > kTolerance ? 1 : (v < -kTolerance ? -1 : 0); }
};

template <class Scalar>
using SparseColumn = std::vector<std::pair<std::size_t, Scalar>>;

/// min cost^T x  subject to  A x = rhs,  x >= 0,  with A stored by columns.
template <class Scalar>
struct LinearProgram {
  std::size_t rows = 0;
  std::vector<SparseColumn<Scalar>> columns;
  std::vector<Scalar> cost;
  std::vector<Scalar> rhs;

  std::size_t add_column(SparseColumn<Scalar> column, Scalar c) {
    columns.push_back(std::move(column));
    cost.push_back(std::move(c));
    return columns.size() - 1;
  }
};

enum class PivotRule {
  kBland,    ///< smallest-index entering and leaving variable
  kDantzig,  ///< most negative reduced cost; Bland after a run of degenerate pivots
};

enum class LpStatus { kOptimal, kInfeasible, kUnbounded };

struct SimplexOptions {
  PivotRule rule = PivotRule::kDantzig;
  std::size_t degenerate_run_before_bland = 50;
  std::size_t max_iterations = 50'000'000;
};

template <class Scalar>
struct LpSolution {
  LpStatus status = LpStatus::kInfeasible;
  Scalar objective{};
  std::vector<Scalar> x;      ///< primal values per column
  std::vector<Scalar> duals;  ///< row prices; A^T duals <= cost at optimality
  std::vector<std::size_t> basis;
  std::size_t iterations = 0;
};

namespace detail {

// Two-phase revised simplex with an explicit dense basis inverse.
template <class Scalar>
class RevisedSimplex {
  using Traits = ScalarTraits<Scalar>;

 public:
  RevisedSimplex(const LinearProgram<Scalar>& lp, const SimplexOptions& options)
      : lp_(lp), options_(options), m_(lp.rows), structural_(lp.columns.size()) {
    if (lp.cost.size() != structural_ || lp.rhs.size() != m_) throw DimensionError("inconsistent linear program");
    for (const auto& col : lp.columns) {
      for (const auto& [row, v] : col) {
        if (row >= m_) throw DimensionError("column entry outside the row range");
      }
    }
    row_sign_.assign(m_, 1);
    for (std::size_t i = 0; i < m_; ++i) {
      if (Traits::sign(lp.rhs[i]) < 0) row_sign_[i] = -1;
    }
  }

  LpSolution<Scalar> run() {
    initial_basis();
    LpSolution<Scalar> out;
    if (artificial_count_ > 0) {
      phase_costs(true);
      const LpStatus s = iterate();
      if (s != LpStatus::kOptimal) throw Error("phase 1 did not reach an optimum");
      Scalar infeasibility{};
      for (std::size_t i = 0; i < m_; ++i) {
        if (is_artificial(basis_[i])) infeasibility += x_basic_[i];
      }
      if (Traits::sign(infeasibility) > 0) {
        out.status = LpStatus::kInfeasible;
        out.iterations = iterations_;
        return out;
      }
      drive_out_artificials();
    }
    phase_costs(false);
    out.status = iterate();
    out.iterations = iterations_;
    if (out.status != LpStatus::kOptimal) return out;

    out.x.assign(structural_, Scalar{});
    for (std::size_t i = 0; i < m_; ++i) {
      if (!is_artificial(basis_[i])) out.x[basis_[i]] = x_basic_[i];
    }
    out.objective = Scalar{};
    for (std::size_t j = 0; j < structural_; ++j) {
      if (Traits::sign(out.x[j]) != 0) out.objective += lp_.cost[j] * out.x[j];
    }
    recompute_duals();
    out.duals.resize(m_);
    for (std::size_t i = 0; i < m_; ++i) out.duals[i] = row_sign_[i] > 0 ? duals_[i] : Scalar(-duals_[i]);
    out.basis = basis_;
    return out;
  }

 private:
  bool is_artificial(std::size_t j) const { return j >= structural_; }

  Scalar& inv(std::size_t i, std::size_t k) { return binv_[i * m_ + k]; }

  // Column j with the row signs applied; artificial j is the unit vector of row j - structural_.
  template <class Fn>
  void for_column(std::size_t j, Fn&& fn) const {
    if (is_artificial(j)) {
      fn(j - structural_, Scalar(1));
      return;
    }
    for (const auto& [row, v] : lp_.columns[j]) {
      if (row_sign_[row] > 0) {
        fn(row, v);
      } else {
        fn(row, Scalar(-v));
      }
    }
  }

  // Uses a positive unit column per row where one exists, an artificial otherwise.
  void initial_basis() {
    binv_.assign(m_ * m_, Scalar{});
    basis_.assign(m_, std::numeric_limits<std::size_t>::max());
    x_basic_.assign(m_, Scalar{});
    for (std::size_t j = 0; j < structural_; ++j) {
      const auto& col = lp_.columns[j];
      std::size_t nonzero = 0, row = 0;
      Scalar value{};
      for (const auto& [r, v] : col) {
        if (Traits::sign(v) != 0) {
          ++nonzero;
          row = r;
          value = row_sign_[r] > 0 ? v : Scalar(-v);
        }
      }
      if (nonzero != 1 || Traits::sign(value) <= 0 || basis_[row] != std::numeric_limits<std::size_t>::max()) continue;
      basis_[row] = j;
      inv(row, row) = Scalar(1) / value;
    }
    for (std::size_t i = 0; i < m_; ++i) {
      const Scalar b = row_sign_[i] > 0 ? lp_.rhs[i] : Scalar(-lp_.rhs[i]);
      if (basis_[i] == std::numeric_limits<std::size_t>::max()) {
        basis_[i] = structural_ + i;
        inv(i, i) = Scalar(1);
        ++artificial_count_;
      }
      x_basic_[i] = inv(i, i) * b;
    }
    in_basis_.assign(structural_ + m_, false);
    for (std::size_t j : basis_) in_basis_[j] = true;
  }

  void phase_costs(bool phase_one) {
    phase_one_ = phase_one;
    recompute_duals();
  }

  Scalar cost_of(std::size_t j) const {
    if (is_artificial(j)) return phase_one_ ? Scalar(1) : Scalar{};
    return phase_one_ ? Scalar{} : lp_.cost[j];
  }

  void recompute_duals() {
    duals_.assign(m_, Scalar{});
    for (std::size_t i = 0; i < m_; ++i) {
      const Scalar c = cost_of(basis_[i]);
      if (Traits::sign(c) == 0) continue;
      for (std::size_t k = 0; k < m_; ++k) {
        const Scalar& v = binv_[i * m_ + k];
        if (Traits::sign(v) != 0) duals_[k] += c * v;
      }
    }
  }

  Scalar reduced_cost(std::size_t j) const {
    Scalar r = cost_of(j);
    for_column(j, [&](std::size_t row, const Scalar& v) {
      if (Traits::sign(duals_[row]) != 0) r -= duals_[row] * v;
    });
    return r;
  }

  bool may_enter(std::size_t j) const { return !in_basis_[j] && (phase_one_ || !is_artificial(j)); }

  std::optional<std::size_t> choose_entering(bool bland, Scalar& entering_cost) const {
    std::optional<std::size_t> best;
    const std::size_t limit = phase_one_ ? structural_ + m_ : structural_;
    for (std::size_t j = 0; j < limit; ++j) {
      if (!may_enter(j)) continue;
      Scalar r = reduced_cost(j);
      if (Traits::sign(r) >= 0) continue;
      if (bland) {
        entering_cost = std::move(r);
        return j;
      }
      if (!best || r < entering_cost) {
        best = j;
        entering_cost = std::move(r);
      }
    }
    return best;
  }

  std::vector<Scalar> transformed_column(std::size_t q) {
    std::vector<Scalar> d(m_, Scalar{});
    std::vector<std::pair<std::size_t, Scalar>> a;
    for_column(q, [&](std::size_t row, const Scalar& v) { a.emplace_back(row, v); });
    for (std::size_t i = 0; i < m_; ++i) {
      const Scalar* row = &binv_[i * m_];
      for (const auto& [k, v] : a) {
        if (Traits::sign(row[k]) != 0) d[i] += row[k] * v;
      }
    }
    return d;
  }

  void pivot(std::size_t r, std::size_t q, const std::vector<Scalar>& d, const Scalar& entering_cost) {
    const Scalar theta = x_basic_[r] / d[r];
    for (std::size_t i = 0; i < m_; ++i) {
      if (i != r && Traits::sign(d[i]) != 0) x_basic_[i] -= theta * d[i];
    }
    x_basic_[r] = theta;
    if constexpr (!std::is_same_v<Scalar, Rational>) {
      for (auto& v : x_basic_) {
        if (Traits::sign(v) <= 0) v = Scalar{};
      }
    }

    Scalar* pivot_row = &binv_[r * m_];
    std::vector<std::size_t> nonzero;
    for (std::size_t k = 0; k < m_; ++k) {
      if (Traits::sign(pivot_row[k]) != 0) {
        pivot_row[k] /= d[r];
        nonzero.push_back(k);
      } else {
        pivot_row[k] = Scalar{};
      }
    }
    Scalar factor;
    for (std::size_t i = 0; i < m_; ++i) {
      if (i == r || Traits::sign(d[i]) == 0) continue;
      Scalar* row = &binv_[i * m_];
      for (std::size_t k : nonzero) {
        factor = d[i] * pivot_row[k];
        row[k] -= factor;
      }
    }
    for (std::size_t k : nonzero) {
      factor = entering_cost * pivot_row[k];
      duals_[k] += factor;
    }
    in_basis_[basis_[r]] = false;
    in_basis_[q] = true;
    basis_[r] = q;
  }

  LpStatus iterate() {
    std::size_t degenerate_run = 0;
    for (;;) {
      if (iterations_ >= options_.max_iterations) throw Error("simplex iteration limit reached");
      if constexpr (!std::is_same_v<Scalar, Rational>) {
        if (iterations_ % 64 == 0) recompute_duals();
      }
      const bool bland =
          options_.rule == PivotRule::kBland || degenerate_run >= options_.degenerate_run_before_bland;
      Scalar entering_cost{};
      const auto q = choose_entering(bland, entering_cost);
      if (!q) return LpStatus::kOptimal;
      const std::vector<Scalar> d = transformed_column(*q);
      std::optional<std::size_t> leave;
      Scalar best_ratio{};
      for (std::size_t i = 0; i < m_; ++i) {
        if (Traits::sign(d[i]) <= 0) continue;
        Scalar ratio = x_basic_[i] / d[i];
        if (!leave || ratio < best_ratio ||
            (Traits::sign(ratio - best_ratio) == 0 && basis_[i] < basis_[*leave])) {
          leave = i;
          best_ratio = std::move(ratio);
        }
      }
      if (!leave) return LpStatus::kUnbounded;
      degenerate_run = Traits::sign(best_ratio) == 0 ? degenerate_run + 1 : 0;
      pivot(*leave, *q, d, entering_cost);
      ++iterations_;
    }
  }

  // Replaces zero-level artificials by structural columns where the row allows it.
  void drive_out_artificials() {
    for (std::size_t r = 0; r < m_; ++r) {
      if (!is_artificial(basis_[r])) continue;
      for (std::size_t j = 0; j < structural_; ++j) {
        if (in_basis_[j]) continue;
        Scalar dr{};
        for_column(j, [&](std::size_t row, const Scalar& v) { dr += inv(r, row) * v; });
        if (Traits::sign(dr) == 0) continue;
        const std::vector<Scalar> d = transformed_column(j);
        pivot(r, j, d, Scalar{});
        break;
      }
    }
  }

  const LinearProgram<Scalar>& lp_;
  SimplexOptions options_;
  std::size_t m_;
  std::size_t structural_;
  std::vector<int> row_sign_;
  std::vector<Scalar> binv_;
  std::vector<std::size_t> basis_;
  std::vector<bool> in_basis_;
  std::vector<Scalar> x_basic_;
  std::vector<Scalar> duals_;
  std::size_t artificial_count_ = 0;
  std::size_t iterations_ = 0;
  bool phase_one_ = false;
};

}  // namespace detail

/// Solves a standard-form LP. With Scalar = Rational every step is exact.
template <class Scalar>
LpSolution<Scalar> solve_lp(const LinearProgram<Scalar>& lp, const SimplexOptions& options = {}) {
  return detail::RevisedSimplex<Scalar>(lp, options).run();
}

}  // namespace nlbox
