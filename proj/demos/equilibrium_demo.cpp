// Runs best-response dynamics on a 20-agent uniform-prior game from two
// different starts and shows both fixed points, then the histogram over
// random geometric initializations.

#include <iostream>

#include "pgg/pgg.hpp"

int main() {
  pgg::GameParams params;
  params.n_agents = 20;
  params.rate = 1.0;
  params.prior = pgg::UniformPrior{};

  for (const int start : {0, 30}) {
    const pgg::DynamicsTrace trace =
        pgg::br_dynamics(params, pgg::symmetric_profile(20, pgg::Threshold::finite(start)),
                         pgg::Schedule::kSequential);
    std::cout << "init all-" << start << " -> "
              << trace.iterations.back().front().to_string() << " in " << trace.sweeps_used
              << " sweeps (equilibrium: "
              << (pgg::is_equilibrium(params, trace.iterations.back()) ? "yes" : "no") << ")\n";
  }

  const pgg::EquilibriumHistogram hist =
      pgg::multiplicity_experiment(params, 100, 0.05, /*seed=*/1);
  std::cout << "100 random geometric(0.05) starts:\n";
  for (const auto& entry : hist.entries) {
    std::cout << "  tau* = " << entry.profile.front().to_string() << "  x" << entry.count
              << "\n";
  }
  return 0;
}
