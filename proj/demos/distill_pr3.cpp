// Distill a noisy 3-party PR box with the generalized BS protocol and print eps_k.

#include <iostream>

#include "nlbox/nlbox.hpp"

int main() {
  using namespace nlbox;
  const Rational eps0(1, 10);
  DistillOptions options;
  options.box_level_audit = true;
  const DistillationTrace t = distill_to(3, eps0, Rational(1, 1000), options);
  std::cout << "rounds: " << t.rounds() << ", audited at box level: " << t.audited_rounds << '\n';
  for (std::size_t k = 0; k <= t.exact_rounds() && k < 6; ++k) {
    std::cout << "eps_" << k << " = " << to_string(t.epsilons[k].value()) << '\n';
  }
  const EpsilonEnclosure& last = t.epsilons.back();
  std::cout << "eps_" << t.rounds() << " in [" << to_double(last.lower) << ", " << to_double(last.upper) << "]\n";

  // One explicit round on the box tables.
  const ConditionalBox noisy = mix(make_npr(3), make_even_parity(3), eps0);
  const ConditionalBox once = compose_adaptive(noisy, noisy, bs_wiring(3));
  std::cout << "one BS round gives eps = " << to_string(decompose_epsilon(once, make_npr(3), make_even_parity(3)))
            << '\n';
}
