#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "nlbox/anf.hpp"
#include "nlbox/box.hpp"
#include "nlbox/distill.hpp"
#include "nlbox/errors.hpp"
#include "nlbox/wiring.hpp"

namespace nlbox {

namespace detail {

inline void require_single_component(const MonomialStructure& s) {
  if (s.component_count() != 1) {
    throw HypothesisError("theorem hypothesis not met: the non-local monomials form " +
                          std::to_string(s.component_count()) + " disjoint groups (need exactly 1)");
  }
}

inline void require_covers_support(const MonomialStructure& s, int n) {
  if (n < 1 || (s.support & ~full_mask(n)) != 0) {
    throw DomainError("party count " + std::to_string(n) + " does not cover the monomial support");
  }
}

}  // namespace detail

/// One-way channels needed to simulate the full-correlation box without any box: |support| - 1.
inline int channels_scratch(const MonomialStructure& s) {
  detail::require_single_component(s);
  return s.support_size() - 1;
}

/// Upper bound on channels when the best-isolated monomial is distilled instead of simulated.
inline int channels_distill_bound(const MonomialStructure& s, int n) {
  detail::require_single_component(s);
  detail::require_covers_support(s, n);
  const int best = s.max_exclusive_count();
  return best == n ? 0 : n - 1 - best;
}

/// Precondition under which distillation needs strictly fewer channels than simulation.
inline bool corollary_holds(const MonomialStructure& s, int n) {
  detail::require_single_component(s);
  detail::require_covers_support(s, n);
  return s.max_exclusive_count() > n - s.support_size();
}

struct Channel {
  int sender = 0;  ///< 1-based
  int receiver = 0;

  friend bool operator==(const Channel&, const Channel&) = default;
};

struct CommunicationPlan {
  std::vector<Channel> channels;
  /// Monomial whose generalized PR box is isolated and distilled.
  Monomial isolated = 0;
  int receiver = 0;
  /// Constant inputs (1-based party -> bit) for the parties outside the isolated monomial.
  std::map<int, bool> constants;
};

/// Isolates the monomial with the most exclusive variables (ties: lexicographically
/// smallest). Every party other than the receiver and the exclusive members of that
/// monomial forwards along a chain in descending party order ending at the receiver.
inline CommunicationPlan make_isolation_plan(const MonomialStructure& s, int n) {
  detail::require_single_component(s);
  detail::require_covers_support(s, n);
  if (s.nonlocal.empty()) throw HypothesisError("no non-local monomial to isolate");
  std::size_t best = 0;
  for (std::size_t k = 1; k < s.nonlocal.size(); ++k) {
    if (s.exclusive_counts[k] > s.exclusive_counts[best]) best = k;
  }
  if (s.exclusive_counts[best] < 1) {
    throw HypothesisError("every non-local monomial shares all of its variables; nothing can be isolated");
  }
  CommunicationPlan plan;
  plan.isolated = s.nonlocal[best];
  const Bits exclusive = s.exclusive_variables(plan.isolated);
  const Bits shared = plan.isolated & ~exclusive;
  plan.receiver = std::countr_zero(shared != 0 ? shared : plan.isolated) + 1;

  std::vector<int> senders;
  for (int p = n; p >= 1; --p) {
    if (p != plan.receiver && !bit(exclusive, p - 1)) senders.push_back(p);
  }
  for (std::size_t k = 0; k < senders.size(); ++k) {
    const int next = k + 1 < senders.size() ? senders[k + 1] : plan.receiver;
    plan.channels.push_back({senders[k], next});
  }
  for (int p = 1; p <= n; ++p) {
    if (!bit(plan.isolated, p - 1)) plan.constants[p] = false;
  }
  return plan;
}

struct PartialCommDistillation {
  ConditionalBox input;      ///< eps * FC(f) + (1 - eps) * FC(local_noise)
  ConditionalBox isolated;   ///< collapsed box on the isolated parties
  ConditionalBox distilled;  ///< isolated box after the BS rounds
  ConditionalBox final_box;  ///< recombined n-party box
  DistillationTrace trace;
  CommunicationPlan plan;
  Anf residual;  ///< f without the isolated monomial
};

/// Isolates a PR/even-parity mixture on the best monomial, distills it for `rounds` BS
/// rounds at box level, and recombines it with the communication-simulated rest of f.
/// Cost grows quickly with `rounds` since coefficient sizes double each round.
inline PartialCommDistillation partial_comm_distill(const Anf& f, const Anf& local_noise, const Rational& epsilon,
                                                    std::size_t rounds) {
  const int n = f.variables();
  if (local_noise.variables() != n) throw DimensionError("noise function has a different variable count");
  if (local_noise.degree() > 1) throw DomainError("noise function must have degree <= 1");
  detail::require_open_start(epsilon);

  const MonomialStructure s = monomial_structure(f);
  CommunicationPlan plan = make_isolation_plan(s, n);
  for (Monomial m : s.nonlocal) {
    if (m != plan.isolated && (m & ~plan.isolated) == 0) {
      throw HypothesisError("monomial " + Anf::product(n, m).to_string() +
                            " lies inside the isolated monomial and cannot be removed by constant inputs");
    }
  }

  const ConditionalBox input = mix(make_full_correlation(f), make_full_correlation(local_noise), epsilon);
  const ConditionalBox stripped = xor_local_part(input, strip_local_part(f).local);
  std::set<int> absorbed;
  for (const auto& [p, value] : plan.constants) absorbed.insert(p);
  ConditionalBox isolated = collapse_parties(stripped, plan.constants, absorbed, plan.receiver);

  const int k = popcount(plan.isolated);
  const NoiseFamilyMember start{make_npr(k), make_even_parity(k), epsilon};
  if (isolated != start.realized()) {
    throw NotInFamilyError("isolated box is not a PR / even-parity mixture: the noise does not match the "
                           "local part of f on the isolated parties");
  }

  DistillOptions options;
  options.box_level_audit = true;
  options.max_exact_bits = std::numeric_limits<std::size_t>::max();
  DistillationTrace trace = distill_rounds(k, epsilon, rounds, options);
  // The audit ran every round at box level, so the last coefficient is box-certified.
  const NoiseFamilyMember member{start.target, start.local, trace.epsilons.back().value()};
  ConditionalBox distilled = member.realized();

  Anf residual = f ^ Anf::product(n, plan.isolated);
  const ConditionalBox rest = make_full_correlation(residual);
  ConditionalBox final_box = xor_embedded(distilled, indices_of(plan.isolated), rest);
  if (final_box != mix(make_full_correlation(f), rest, member.epsilon)) {
    throw Error("recombined box differs from the predicted mixture");
  }
  return {input, std::move(isolated), std::move(distilled), std::move(final_box), std::move(trace), std::move(plan),
          std::move(residual)};
}

struct SurveyEntry {
  Anf function;
  MonomialStructure structure;
  std::optional<int> channels_scratch;
  std::optional<int> channels_distill_bound;
  std::optional<bool> corollary_holds;
  /// Channels used by the isolation plan, when a plan exists.
  std::optional<int> plan_channels;
  std::size_t class_index = 0;
};

/// Orbit of functions under input flips, input permutations and output complement.
struct SurveyClass {
  Anf representative;  ///< member with the smallest truth-table index
  std::size_t members = 0;
  std::size_t nonlocal_members = 0;
  std::size_t precondition_holds = 0;
};

struct ThreePartySurvey {
  std::vector<SurveyEntry> entries;  ///< functions with a non-local part, by truth-table index
  std::vector<SurveyClass> classes;
  /// Classes with non-local members none of which satisfies the corollary precondition.
  std::vector<std::size_t> classes_never_satisfying;
  /// False when some function with a non-local part fails the corollary precondition.
  bool all_nonlocal_satisfy = true;
  /// Functions whose isolation plan needs more channels than the distillation bound.
  std::vector<Anf> plan_exceeds_bound;
};

namespace detail {

inline unsigned truth_table_index(const TruthTable& t) {
  unsigned v = 0;
  for (std::size_t i = 0; i < t.size(); ++i) v |= unsigned(t[i]) << i;
  return v;
}

// Smallest truth-table index in the orbit of `index` (3 variables).
inline unsigned canonical_three_party(unsigned index) {
  unsigned best = std::numeric_limits<unsigned>::max();
  std::array<int, 3> perm{0, 1, 2};
  do {
    for (unsigned flips = 0; flips < 8; ++flips) {
      for (unsigned complement = 0; complement < 2; ++complement) {
        unsigned image = 0;
        for (unsigned x = 0; x < 8; ++x) {
          unsigned source = 0;
          for (int i = 0; i < 3; ++i) {
            if ((x >> i) & 1U) source |= 1U << perm[static_cast<std::size_t>(i)];
          }
          source ^= flips;
          const unsigned value = ((index >> source) & 1U) ^ complement;
          image |= value << x;
        }
        best = std::min(best, image);
      }
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

inline Anf function_from_index(unsigned index) {
  TruthTable t(8);
  for (unsigned x = 0; x < 8; ++x) t[x] = static_cast<std::uint8_t>((index >> x) & 1U);
  return anf_from_truth_table(t);
}

}  // namespace detail

/// Communication counts for every Boolean function of three variables.
inline ThreePartySurvey survey_three_party() {
  constexpr int n = 3;
  ThreePartySurvey survey;
  std::map<unsigned, std::size_t> class_of;
  for (unsigned index = 0; index < 256; ++index) {
    const unsigned canonical = detail::canonical_three_party(index);
    const auto [it, inserted] = class_of.try_emplace(canonical, survey.classes.size());
    if (inserted) survey.classes.push_back({detail::function_from_index(canonical), 0, 0, 0});
    SurveyClass& cls = survey.classes[it->second];
    ++cls.members;

    const Anf f = detail::function_from_index(index);
    SurveyEntry entry{f, monomial_structure(f), {}, {}, {}, {}, it->second};
    if (entry.structure.nonlocal.empty()) continue;
    ++cls.nonlocal_members;
    if (entry.structure.component_count() == 1) {
      entry.channels_scratch = channels_scratch(entry.structure);
      entry.channels_distill_bound = channels_distill_bound(entry.structure, n);
      entry.corollary_holds = corollary_holds(entry.structure, n);
      if (entry.structure.max_exclusive_count() >= 1) {
        entry.plan_channels = static_cast<int>(make_isolation_plan(entry.structure, n).channels.size());
        if (*entry.plan_channels > *entry.channels_distill_bound) survey.plan_exceeds_bound.push_back(f);
      }
    }
    if (entry.corollary_holds.value_or(false)) {
      ++cls.precondition_holds;
    } else {
      survey.all_nonlocal_satisfy = false;
    }
    survey.entries.push_back(std::move(entry));
  }
  for (std::size_t c = 0; c < survey.classes.size(); ++c) {
    if (survey.classes[c].nonlocal_members > 0 && survey.classes[c].precondition_holds == 0) {
      survey.classes_never_satisfying.push_back(c);
    }
  }
  return survey;
}

}  // namespace nlbox
