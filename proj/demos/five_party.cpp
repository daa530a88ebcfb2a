// Monomial structure, isolation plan and distance to the local polytope for
// f = x1x2x3 ^ x1x4 ^ x4x5 ^ x3.

#include <iostream>

#include "nlbox/nlbox.hpp"

int main() {
  using namespace nlbox;
  const Anf f = Anf::from_index_lists(5, {{1, 2, 3}, {1, 4}, {4, 5}, {3}});
  const MonomialStructure s = monomial_structure(f);
  std::cout << "f = " << f.to_string() << "\ncomponents: " << s.component_count()
            << "\nchannels from scratch: " << channels_scratch(s)
            << "\nchannels to distill (bound): " << channels_distill_bound(s, 5) << '\n';

  const CommunicationPlan plan = make_isolation_plan(s, 5);
  for (const Channel& c : plan.channels) std::cout << "  channel " << c.sender << " -> " << c.receiver << '\n';

  const DistanceCertificate cert = l1_distance_to_local(make_full_correlation(f));
  std::cout << "L1 distance to local: " << to_string(cert.distance) << " using " << cert.primal_weights.size()
            << " deterministic strategies\n";
}
