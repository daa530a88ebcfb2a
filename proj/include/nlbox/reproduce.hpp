#pragma once

#include <cstddef>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "nlbox/anf.hpp"
#include "nlbox/box.hpp"
#include "nlbox/comm.hpp"
#include "nlbox/distill.hpp"
#include "nlbox/localdist.hpp"

namespace nlbox {

/// One checked quantity of the worked five-party example.
struct ExampleCheck {
  std::string name;
  std::string expected;
  std::string actual;
  bool pass = false;
  std::string note;
};

struct ExampleReport {
  Anf function;
  std::vector<ExampleCheck> checks;
  DistillationTrace trace;
  DistanceCertificate certificate;

  bool all_pass() const {
    for (const auto& c : checks) {
      if (!c.pass) return false;
    }
    return true;
  }
};

struct ExampleOptions {
  Rational epsilon{1, 2};
  std::size_t rounds = 10;
};

inline Anf example_function() { return Anf::from_index_lists(5, {{1, 2, 3}, {1, 4}, {4, 5}, {3}}); }

namespace detail {

inline std::string index_lists_string(const std::vector<Monomial>& ms) {
  std::string s = "{";
  for (std::size_t k = 0; k < ms.size(); ++k) {
    if (k) s += ",";
    s += "{";
    const auto idx = indices_of(ms[k]);
    for (std::size_t t = 0; t < idx.size(); ++t) s += (t ? "," : "") + std::to_string(idx[t]);
    s += "}";
  }
  return s + "}";
}

template <class T>
std::string join(const std::vector<T>& v) {
  std::ostringstream out;
  out << "(";
  for (std::size_t k = 0; k < v.size(); ++k) out << (k ? "," : "") << v[k];
  out << ")";
  return out.str();
}

inline std::string channels_string(const std::vector<Channel>& cs) {
  std::string s;
  for (const auto& c : cs) s += (s.empty() ? "" : ", ") + std::to_string(c.sender) + "->" + std::to_string(c.receiver);
  return "[" + s + "]";
}

}  // namespace detail

/// Runs the five-party pipeline: structure, counts, plan, isolation, BS rounds, distance.
/// Deterministic; no randomness on this path.
inline ExampleReport reproduce_example(const ExampleOptions& options = {}) {
  const Anf f = example_function();
  const int n = f.variables();
  std::vector<ExampleCheck> checks;
  auto add = [&checks](std::string name, std::string expected, std::string actual, std::string note = {}) {
    const bool pass = expected == actual;
    checks.push_back({std::move(name), std::move(expected), std::move(actual), pass, std::move(note)});
  };

  std::vector<Monomial> monomials(f.monomials().begin(), f.monomials().end());
  add("ANF monomials", "{{1,2,3},{1,4},{3},{4,5}}", detail::index_lists_string(monomials));

  const MonomialStructure s = monomial_structure(f);
  add("J", "{{1,2,3},{1,4},{4,5}}", detail::index_lists_string(s.nonlocal));
  add("n_J", "1", std::to_string(s.component_count()));
  add("m per member of J", "(2,1,1)", detail::join(s.exclusive_counts),
      "m_I = |I minus the union of the other members|; parties 1 and 4 each lie in two members, "
      "which gives m_{1,4} = 0 and leaves the expected 1 out of reach");
  add("N_scratch", "4", std::to_string(channels_scratch(s)),
      "|union of J| - 1; the same 4 is sometimes labelled N_distill, which is the bound below");
  add("N_distill bound", "2", std::to_string(channels_distill_bound(s, n)));
  add("corollary precondition", "true", corollary_holds(s, n) ? "true" : "false");

  const ConditionalBox target = make_full_correlation(f);
  add("target non-signaling", "true", is_nonsignaling(target) ? "true" : "false");

  const Anf noise = Anf::from_index_lists(n, {{3}});
  const PartialCommDistillation run = partial_comm_distill(f, noise, options.epsilon, options.rounds);
  add("isolated monomial", "{{1,2,3}}", detail::index_lists_string({run.plan.isolated}));
  add("plan channels", "[5->4, 4->1]", detail::channels_string(run.plan.channels));
  add("plan receiver", "1", std::to_string(run.plan.receiver));
  const ConditionalBox expected_isolated = mix(make_npr(3), make_even_parity(3), options.epsilon);
  add("isolated box is PR_3/even mixture at epsilon " + to_string(options.epsilon), "true",
      run.isolated == expected_isolated ? "true" : "false");

  Rational eps = options.epsilon;
  for (std::size_t k = 0; k < options.rounds; ++k) eps = t_map(3, eps);
  add("epsilon after " + std::to_string(options.rounds) + " rounds", to_string(eps),
      to_string(run.trace.epsilons.back().value()));
  add("box-level audited rounds", std::to_string(options.rounds), std::to_string(run.trace.audited_rounds));
  add("final box is eps_m FC(f) + (1 - eps_m) FC(residual)", "true",
      run.final_box == mix(target, make_full_correlation(run.residual), eps) ? "true" : "false");
  add("residual", "x1x4 ^ x3 ^ x4x5", run.residual.to_string());

  DistanceCertificate certificate = l1_distance_to_local(target);
  add("L1 distance to the local polytope", "20/1", to_string(certificate.distance));
  const AffineApproximation nearest = nearest_affine_oracle(f);
  add("nearest affine function", "x3", nearest.witness.to_string());
  add("2 x nearest affine mismatches", to_string(certificate.distance), to_string(Rational(2 * nearest.mismatches)));
  const ConditionalBox parity_x3 = make_full_correlation(noise);
  add("L1 distance to the parity-x3 box", "20/1", to_string(l1_distance(target, parity_x3)),
      "one closest local box; closest boxes are not unique");
  add("parity-x3 box is local", "0/1", to_string(l1_distance_to_local(parity_x3).distance));
  return {f, std::move(checks), run.trace, std::move(certificate)};
}

}  // namespace nlbox
