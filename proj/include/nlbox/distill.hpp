#pragma once

#include <algorithm>
#include <cstddef>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "nlbox/box.hpp"
#include "nlbox/errors.hpp"
#include "nlbox/rational.hpp"
#include "nlbox/wiring.hpp"

namespace nlbox {

namespace detail {

// eps * (2^{n-1} + 1 - eps) / 2^{n-1}, evaluated without range checks.
inline Rational t_map_polynomial(int n, const Rational& eps) {
  const Rational scale = pow2(n - 1);
  return Rational(eps * (scale + 1 - eps)) / scale;
}

inline void require_distillable_n(int n) {
  if (n < 2 || n > kMaxParties) {
    throw DomainError("party count " + std::to_string(n) + " outside 2.." + std::to_string(kMaxParties));
  }
}

}  // namespace detail

/// One round of the generalized BS protocol on the epsilon coordinate.
inline Rational t_map(int n, const Rational& eps) {
  detail::require_distillable_n(n);
  require_unit_interval(eps, "t_map");
  return detail::t_map_polynomial(n, eps);
}

/// Exact box-level round: composes two copies of the realized box under bs_wiring and
/// reads the new coefficient back off the composed table. Throws if the composed box
/// leaves the PR/even-parity family or disagrees with t_map.
inline NoiseFamilyMember bs_round(const NoiseFamilyMember& member) {
  const int n = member.target.parties();
  detail::require_distillable_n(n);
  if (member.target != make_npr(n) || member.local != make_even_parity(n)) {
    throw NotInFamilyError("bs_round: member is not in the n-PR / even-parity family");
  }
  require_unit_interval(member.epsilon, "bs_round");
  const ConditionalBox realized = member.realized();
  const ConditionalBox composed = compose_adaptive(realized, realized, bs_wiring(n));
  Rational next = decompose_epsilon(composed, member.target, member.local);
  if (next != t_map(n, member.epsilon)) {
    throw Error("bs_round: composed coefficient " + to_string(next) + " differs from T_n(" +
                to_string(member.epsilon) + ")");
  }
  return NoiseFamilyMember{member.target, member.local, std::move(next)};
}

/// Either an exact coefficient (lower == upper) or a certified dyadic enclosure of it.
struct EpsilonEnclosure {
  Rational lower;
  Rational upper;

  bool exact() const { return lower == upper; }
  const Rational& value() const {
    if (!exact()) throw Error("epsilon is only known as an enclosure");
    return lower;
  }
};

struct DistillationTrace {
  int parties = 0;
  /// epsilons[k] encloses eps_k; epsilons[0] is the exact starting value.
  std::vector<EpsilonEnclosure> epsilons;
  /// Leading rounds that were also executed and checked at box level.
  std::size_t audited_rounds = 0;

  std::size_t rounds() const { return epsilons.empty() ? 0 : epsilons.size() - 1; }
  std::size_t exact_rounds() const {
    std::size_t k = 0;
    while (k + 1 < epsilons.size() && epsilons[k + 1].exact()) ++k;
    return k;
  }
  /// 2^rounds copies of the starting box are consumed.
  mpz_class copies_used() const {
    mpz_class c = 1;
    mpz_mul_2exp(c.get_mpz_t(), c.get_mpz_t(), rounds());
    return c;
  }
};

struct DistillOptions {
  /// Run and check every exact round at box level as well.
  bool box_level_audit = false;
  /// Iterates stay exact while numerator plus denominator fit in this many bits.
  std::size_t max_exact_bits = 16384;
  std::size_t max_rounds = 100000;
};

namespace detail {

enum class StopDecision { kContinue, kStop, kUndecided };

// Raised when an enclosure straddles the stopping threshold.
struct UndecidedStop {};

inline void require_open_start(const Rational& eps0) {
  if (sgn(eps0) == 0) throw DomainError("epsilon 0 is a fixed point: not distillable to the target");
  if (eps0 == 1) throw DomainError("epsilon 1 is already maximal");
  require_unit_interval(eps0, "distill");
}

inline DistillationTrace run_trace(int n, const Rational& eps0, unsigned long precision, const DistillOptions& options,
                                   const std::function<StopDecision(const DistillationTrace&)>& decide) {
  DistillationTrace trace{n, {EpsilonEnclosure{eps0, eps0}}, 0};
  NoiseFamilyMember member{make_npr(n), make_even_parity(n), eps0};
  bool auditing = options.box_level_audit;
  for (;;) {
    const StopDecision d = decide(trace);
    if (d == StopDecision::kStop) return trace;
    if (d == StopDecision::kUndecided) throw UndecidedStop{};
    if (trace.rounds() >= options.max_rounds) throw Error("distillation exceeded the round limit");
    const EpsilonEnclosure& cur = trace.epsilons.back();
    EpsilonEnclosure next;
    if (cur.exact()) {
      Rational v = t_map_polynomial(n, cur.lower);
      if (bit_size(v) <= options.max_exact_bits) {
        next = {v, v};
      } else {
        next = {round_down_dyadic(v, precision), round_up_dyadic(v, precision)};
      }
    } else {
      // T_n is increasing on [0,1] for n >= 2, so endpoint images bound the true value.
      next = {round_down_dyadic(t_map_polynomial(n, cur.lower), precision),
              round_up_dyadic(t_map_polynomial(n, cur.upper), precision)};
      next.upper = std::min(next.upper, Rational(1));
    }
    if (auditing && next.exact()) {
      member = bs_round(member);
      if (member.epsilon != next.lower) throw Error("box-level audit disagrees with the scalar trace");
      ++trace.audited_rounds;
    } else {
      auditing = false;
    }
    trace.epsilons.push_back(std::move(next));
  }
}

inline unsigned long initial_precision(const Rational& a, const Rational& b) {
  return 256 + 2 * static_cast<unsigned long>(bit_size(a) + bit_size(b));
}

}  // namespace detail

/// Iterates T_n from eps0 until 1 - eps_m < delta (certified), m = number of rounds.
inline DistillationTrace distill_to(int n, const Rational& eps0, const Rational& delta, const DistillOptions& options = {}) {
  detail::require_distillable_n(n);
  detail::require_open_start(eps0);
  if (sgn(delta) <= 0 || delta >= 1) throw DomainError("delta " + to_string(delta) + " outside (0,1)");
  auto decide = [&delta](const DistillationTrace& t) {
    const EpsilonEnclosure& e = t.epsilons.back();
    if (Rational(1 - e.lower) < delta) return detail::StopDecision::kStop;
    if (Rational(1 - e.upper) >= delta) return detail::StopDecision::kContinue;
    return detail::StopDecision::kUndecided;
  };
  for (unsigned long precision = detail::initial_precision(eps0, delta);; precision *= 2) {
    try {
      return detail::run_trace(n, eps0, precision, options, decide);
    } catch (const detail::UndecidedStop&) {
      if (precision > (1UL << 24)) throw Error("could not certify the stopping round");
    }
  }
}

/// Exactly `rounds` iterations of T_n from eps0.
inline DistillationTrace distill_rounds(int n, const Rational& eps0, std::size_t rounds, const DistillOptions& options = {}) {
  detail::require_distillable_n(n);
  detail::require_open_start(eps0);
  DistillOptions opts = options;
  opts.max_rounds = std::max(opts.max_rounds, rounds);
  auto decide = [rounds](const DistillationTrace& t) {
    return t.rounds() >= rounds ? detail::StopDecision::kStop : detail::StopDecision::kContinue;
  };
  return detail::run_trace(n, eps0, detail::initial_precision(eps0, eps0), opts, decide);
}

enum class FixedPointKind { kRepulsive, kNeutral, kAttractive };

inline const char* to_string(FixedPointKind k) {
  switch (k) {
    case FixedPointKind::kRepulsive: return "repulsive";
    case FixedPointKind::kAttractive: return "attractive";
    case FixedPointKind::kNeutral: return "neutral";
  }
  return "?";
}

struct StabilityReport {
  int parties = 0;
  Rational derivative_at_0;
  Rational derivative_at_1;
  FixedPointKind at_0 = FixedPointKind::kNeutral;
  FixedPointKind at_1 = FixedPointKind::kNeutral;
  /// Central differences of T_n with step 1/10^6.
  Rational finite_difference_at_0;
  Rational finite_difference_at_1;
  bool finite_difference_agrees = false;
};

/// Stability of the fixed points 0 and 1 of T_n from T_n'(eps) = (2^{n-1} + 1 - 2 eps) / 2^{n-1}.
inline StabilityReport stability_report(int n) {
  detail::require_distillable_n(n);
  StabilityReport r;
  r.parties = n;
  const Rational scale = pow2(n - 1);
  auto derivative = [&scale](const Rational& eps) { return Rational(Rational(scale + 1 - 2 * eps) / scale); };
  auto classify = [](const Rational& d) {
    const Rational magnitude = abs(d);
    if (magnitude > 1) return FixedPointKind::kRepulsive;
    if (magnitude < 1) return FixedPointKind::kAttractive;
    return FixedPointKind::kNeutral;
  };
  r.derivative_at_0 = derivative(0);
  r.derivative_at_1 = derivative(1);
  r.at_0 = classify(r.derivative_at_0);
  r.at_1 = classify(r.derivative_at_1);

  const Rational h(1, 1000000);
  auto central = [n, &h](const Rational& eps) {
    return Rational(Rational(detail::t_map_polynomial(n, eps + h) - detail::t_map_polynomial(n, eps - h)) / (2 * h));
  };
  r.finite_difference_at_0 = central(0);
  r.finite_difference_at_1 = central(1);
  const Rational tolerance(1, 1000000000);
  r.finite_difference_agrees = abs(r.finite_difference_at_0 - r.derivative_at_0) <= tolerance &&
                               abs(r.finite_difference_at_1 - r.derivative_at_1) <= tolerance;
  return r;
}

struct RelationCheck {
  std::string name;
  bool holds = false;
};

struct RelationsReport {
  int parties = 0;
  std::vector<RelationCheck> checks;

  bool all_hold() const {
    return std::all_of(checks.begin(), checks.end(), [](const RelationCheck& c) { return c.holds; });
  }
};

/// Checks the four two-box compositions of the PR / even-parity pair under `wiring`.
inline RelationsReport verify_relations(int n, const WiringProtocol& wiring) {
  detail::require_distillable_n(n);
  const ConditionalBox pr = make_npr(n);
  const ConditionalBox even = make_even_parity(n);
  const Rational weight = pow2(1 - n);
  RelationsReport report{n, {}};
  report.checks.push_back({"PR.PR -> PR", compose_adaptive(pr, pr, wiring) == pr});
  report.checks.push_back({"PR.Pc -> PR", compose_adaptive(pr, even, wiring) == pr});
  report.checks.push_back({"Pc.PR -> 2^(1-n) PR + (1-2^(1-n)) Pc", compose_adaptive(even, pr, wiring) == mix(pr, even, weight)});
  report.checks.push_back({"Pc.Pc -> Pc", compose_adaptive(even, even, wiring) == even});
  return report;
}

inline RelationsReport verify_relations(int n) { return verify_relations(n, bs_wiring(n)); }

}  // namespace nlbox
