// Tabulates phi(k) against pi_i(k) for one agent of a 10-agent uniform-prior
// game where everyone else plays Finite{3}, and prints where the curves
// cross. Build and run:
//   ./build/demos/belief_curve_demo

#include <iostream>

#include "pgg/pgg.hpp"

int main() {
  pgg::GameParams params;
  params.n_agents = 10;
  params.rate = 1.0;
  params.prior = pgg::UniformPrior{};

  const pgg::ThresholdProfile profile =
      pgg::symmetric_profile(params.n_agents, pgg::Threshold::finite(3));
  const int cap = pgg::k_cap(params, profile, 0);
  const pgg::BeliefCurve curve = pgg::belief_curve(params, 0, profile, cap);
  pgg::write_belief_curve_csv(std::cout, curve);

  const pgg::BestResponseResult br = pgg::best_response(params, 0, profile);
  std::cout << "# best response: " << br.threshold.to_string() << "\n";
  return 0;
}
