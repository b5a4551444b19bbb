#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "pgg/best_response.hpp"
#include "pgg/errors.hpp"
#include "pgg/model.hpp"
#include "pgg/rng.hpp"

namespace pgg {

// g(lambda) = E[(N-1) e^{-2 lambda Theta} - Theta e^{-lambda Theta}];
// g > 0 guarantees pi_i(0) >= phi(0) for every all-finite threshold profile.
inline double g_lambda(const BinaryPrior& prior, int n_agents, double lambda) {
  const double n1 = n_agents - 1.0;
  const double term0 =
      n1 * std::exp(-2.0 * lambda * prior.theta0) - prior.theta0 * std::exp(-lambda * prior.theta0);
  const double term1 =
      n1 * std::exp(-2.0 * lambda * prior.theta1) - prior.theta1 * std::exp(-lambda * prior.theta1);
  return prior.p0 * term0 + prior.p1() * term1;
}

struct ExistenceCondition {
  bool satisfied = false;
  double margin = 0.0;  // distance from the boundary; g(lambda) itself for condition_lambda
};

struct ExistenceReport {
  std::optional<ExistenceCondition> condition_theta1;  // binary: theta1 > N-1
  std::optional<ExistenceCondition> condition_lambda;  // binary: g(lambda) > 0
  std::optional<ExistenceCondition> condition_rate;    // uniform: lambda > 2/(N-1)
  bool overall = false;
};

inline ExistenceReport check_existence(const GameParams& params) {
  validate(params);
  ExistenceReport report;
  if (params.has_binary_prior()) {
    const BinaryPrior& prior = params.binary_prior();
    const double theta_margin = prior.theta1 - (params.n_agents - 1.0);
    const double g = g_lambda(prior, params.n_agents, params.rate);
    report.condition_theta1 = ExistenceCondition{theta_margin > 0.0, theta_margin};
    report.condition_lambda = ExistenceCondition{g > 0.0, g};
    report.overall = report.condition_theta1->satisfied && report.condition_lambda->satisfied;
  } else {
    const double margin = params.rate - 2.0 / (params.n_agents - 1.0);
    report.condition_rate = ExistenceCondition{margin > 0.0, margin};
    report.overall = report.condition_rate->satisfied;
  }
  return report;
}

struct LambdaBarResult {
  double lambda_bar = 0.0;
  bool saturated = false;  // g stayed positive on the whole bracket (0, lambda_hi]
};

// Largest lambda in (0, lambda_hi] with g(lambda) > 0 up to the first sign
// change, located on a uniform grid and refined by bisection to relative
// tolerance 1e-9. Requires E[Theta] < N-1, which makes g(0) > 0.
inline LambdaBarResult find_lambda_bar(const GameParams& params, double lambda_hi = 10.0,
                                       int grid_points = 10000) {
  validate(params);
  const BinaryPrior& prior = params.binary_prior();
  if (!(prior.mean() < params.n_agents - 1.0)) {
    throw_validation("PremiseViolated", "requires E[Theta] < N - 1");
  }
  double lo = 0.0;
  double hi = -1.0;
  for (int i = 1; i <= grid_points; ++i) {
    const double lambda = lambda_hi * i / grid_points;
    if (g_lambda(prior, params.n_agents, lambda) <= 0.0) {
      hi = lambda;
      break;
    }
    lo = lambda;
  }
  if (hi < 0.0) return LambdaBarResult{lambda_hi, true};
  for (int iter = 0; iter < 200 && hi - lo > 1e-9 * hi; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (g_lambda(prior, params.n_agents, mid) > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return LambdaBarResult{lo, false};
}

enum class Schedule { kSequential, kSimultaneous };

inline const char* schedule_name(Schedule schedule) {
  return schedule == Schedule::kSequential ? "sequential" : "simultaneous";
}

struct DynamicsTrace {
  std::vector<ThresholdProfile> iterations;  // init followed by one snapshot per sweep
  bool converged = false;
  int sweeps_used = 0;
  Schedule schedule = Schedule::kSequential;
};

// Best-response dynamics. The sequential schedule updates agents in index
// order, each seeing the freshest profile; the simultaneous schedule maps
// the previous snapshot through the best-response operator. Convergence is
// declared when a full sweep changes nothing (exact integer comparison).
// Simultaneous sweeps can oscillate, so a period-2 revisit also stops the
// run, reported as non-convergence.
inline DynamicsTrace br_dynamics(const GameParams& params, const ThresholdProfile& init,
                                 Schedule schedule, int max_sweeps = 500,
                                 BeliefWorkspace* workspace = nullptr) {
  validate(params);
  check_profile(params, init);
  if (max_sweeps < 1) {
    throw_validation("InvalidArgument", "max_sweeps must be at least 1");
  }
  std::unique_ptr<BeliefWorkspace> owned;
  if (workspace == nullptr) {
    owned = std::make_unique<BeliefWorkspace>(params);
    workspace = owned.get();
  }

  DynamicsTrace trace;
  trace.schedule = schedule;
  trace.iterations.push_back(init);
  ThresholdProfile current = init;
  for (int sweep = 1; sweep <= max_sweeps; ++sweep) {
    trace.sweeps_used = sweep;
    if (schedule == Schedule::kSequential) {
      for (int i = 0; i < params.n_agents; ++i) {
        current[i] = best_response(params, i, current, workspace).threshold;
      }
    } else {
      const ThresholdProfile previous = current;
      for (int i = 0; i < params.n_agents; ++i) {
        current[i] = best_response(params, i, previous, workspace).threshold;
      }
    }
    trace.iterations.push_back(current);
    const size_t n = trace.iterations.size();
    if (current == trace.iterations[n - 2]) {
      trace.converged = true;
      break;
    }
    if (schedule == Schedule::kSimultaneous && n >= 3 && current == trace.iterations[n - 3]) {
      break;  // period-2 cycle; converged stays false
    }
  }
  return trace;
}

// Fixed point of the best-response map restricted to threshold strategies.
inline bool is_equilibrium(const GameParams& params, const ThresholdProfile& profile,
                           BeliefWorkspace* workspace = nullptr) {
  validate(params);
  check_profile(params, profile);
  std::unique_ptr<BeliefWorkspace> owned;
  if (workspace == nullptr) {
    owned = std::make_unique<BeliefWorkspace>(params);
    workspace = owned.get();
  }
  for (int i = 0; i < params.n_agents; ++i) {
    if (best_response(params, i, profile, workspace).threshold != profile[i]) return false;
  }
  return true;
}

inline ThresholdProfile random_geometric_profile(int n_agents, double p, Rng& rng) {
  ThresholdProfile profile;
  profile.reserve(n_agents);
  for (int i = 0; i < n_agents; ++i) {
    profile.push_back(Threshold::finite(rng.geometric(p)));
  }
  return profile;
}

struct EquilibriumHistogram {
  struct Entry {
    ThresholdProfile profile;
    int count = 0;
  };
  std::vector<Entry> entries;  // sorted by profile; deterministic
  int runs = 0;
};

// Repeated best-response dynamics from Geometric(p) random initial profiles.
// Run r uses the substream (seed, r), so the histogram is reproducible from
// the seed and independent of any execution order.
inline EquilibriumHistogram multiplicity_experiment(const GameParams& params, int runs,
                                                    double init_geometric_p, uint64_t seed,
                                                    int max_sweeps = 500) {
  validate(params);
  if (runs < 1) {
    throw_validation("InvalidArgument", "runs must be at least 1");
  }
  if (!(init_geometric_p > 0.0 && init_geometric_p < 1.0)) {
    throw_validation("InvalidProbability", "init_geometric_p must lie in (0, 1)");
  }
  BeliefWorkspace workspace(params);
  const Rng base(seed);
  std::map<ThresholdProfile, int> counts;
  for (int run = 0; run < runs; ++run) {
    Rng rng = base.substream(static_cast<uint64_t>(run));
    const ThresholdProfile init = random_geometric_profile(params.n_agents, init_geometric_p, rng);
    const DynamicsTrace trace =
        br_dynamics(params, init, Schedule::kSequential, max_sweeps, &workspace);
    if (!trace.converged) {
      throw_numerical("NotConverged",
                      "run " + std::to_string(run) + " did not converge within max_sweeps");
    }
    const ThresholdProfile& fixed = trace.iterations.back();
    if (!is_equilibrium(params, fixed, &workspace)) {
      throw_numerical("EquilibriumCheckFailed",
                      "converged profile of run " + std::to_string(run) + " is not a fixed point");
    }
    ++counts[fixed];
  }
  EquilibriumHistogram hist;
  hist.runs = runs;
  for (const auto& [profile, count] : counts) {
    hist.entries.push_back(EquilibriumHistogram::Entry{profile, count});
  }
  return hist;
}

}  // namespace pgg
