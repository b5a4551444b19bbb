#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "pgg/beliefs.hpp"
#include "pgg/best_response.hpp"
#include "pgg/errors.hpp"
#include "pgg/model.hpp"
#include "pgg/rng.hpp"

namespace pgg {

struct PayoffEstimate {
  double mean = 0.0;
  double half_width_95 = 0.0;  // 1.96 * sample std / sqrt(samples)
  int64_t samples = 0;
};

namespace detail {

// Streaming mean/variance (Welford).
class RunningStats {
 public:
  void add(double x) {
    ++n_;
    const double delta = x - mean_;
    mean_ += delta / n_;
    m2_ += delta * (x - mean_);
  }

  PayoffEstimate estimate() const {
    PayoffEstimate out;
    out.samples = n_;
    out.mean = mean_;
    if (n_ > 1) {
      out.half_width_95 = 1.96 * std::sqrt(m2_ / (n_ - 1)) / std::sqrt(static_cast<double>(n_));
    }
    return out;
  }

 private:
  int64_t n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

inline double activation_cdf(Threshold t, double mean) {
  if (t.is_never()) return 0.0;
  if (t.is_always()) return 1.0;
  return poisson_cdf(t.tau(), mean);
}

}  // namespace detail

// Expected payoff of playing `action` at observation k, conditional on
// Y_i = k: action * (pi_i(k) - phi(k)). The payoff of not activating is
// normalized to zero.
inline double interim_payoff(const GameParams& params, int agent, const ThresholdProfile& profile,
                             int k, int action, BeliefWorkspace* workspace = nullptr) {
  validate(params);
  if (action != 0 && action != 1) {
    throw_validation("InvalidArgument", "action must be 0 or 1");
  }
  if (action == 0) return 0.0;
  BeliefEvaluator eval(params, agent, profile, workspace);
  return eval.pi_at(k) - eval.phi_at(k);
}

// Ex-ante expected payoff under the binary prior, exact up to floating
// point. Conditional on Theta = theta_m the actions are independent with
// P(A_j = 1) = F_{tau_j}(lambda theta_m), so
//   J_i = sum_m p_m F_{tau_i}(lambda theta_m)
//               (sum_{j != i} F_{tau_j}(lambda theta_m) - theta_m).
// The improper uniform prior has no ex-ante expectation; use interim_payoff.
inline double exact_payoff_binary(const GameParams& params, int agent,
                                  const ThresholdProfile& profile) {
  validate(params);
  check_profile(params, profile);
  check_agent_index(params, agent);
  const BinaryPrior& prior = params.binary_prior();
  if (profile[agent].is_always()) {
    throw_validation("UnsupportedThreshold",
                     "exact payoff is defined for Finite or Never own thresholds");
  }
  const double means[2] = {params.rate * prior.theta0, params.rate * prior.theta1};
  const double thetas[2] = {prior.theta0, prior.theta1};
  const double probs[2] = {prior.p0, prior.p1()};
  double payoff = 0.0;
  for (int m = 0; m < 2; ++m) {
    double opponents = 0.0;
    for (int j = 0; j < params.n_agents; ++j) {
      if (j == agent) continue;
      opponents += detail::activation_cdf(profile[j], means[m]);
    }
    const double own = detail::activation_cdf(profile[agent], means[m]);
    payoff += probs[m] * own * (opponents - thetas[m]);
  }
  return payoff;
}

// Monte-Carlo estimate of the same expectation: Theta from the prior, then
// Y_1..Y_N conditionally independent Poisson(lambda Theta).
inline PayoffEstimate mc_payoff(const GameParams& params, int agent,
                                const ThresholdProfile& profile, int64_t samples, uint64_t seed) {
  validate(params);
  check_profile(params, profile);
  check_agent_index(params, agent);
  const BinaryPrior& prior = params.binary_prior();
  if (samples < 1) {
    throw_validation("InvalidArgument", "samples must be at least 1");
  }
  Rng rng(seed);
  detail::RunningStats stats;
  for (int64_t s = 0; s < samples; ++s) {
    const double theta = rng.bernoulli(prior.p0) ? prior.theta0 : prior.theta1;
    const double mean = params.rate * theta;
    int own_action = 0;
    int others = 0;
    for (int j = 0; j < params.n_agents; ++j) {
      const int y = rng.poisson(mean);
      const int a = policy_eval(profile[j], y);
      if (j == agent) {
        own_action = a;
      } else {
        others += a;
      }
    }
    stats.add(own_action * (others - theta));
  }
  return stats.estimate();
}

struct AgentDeviationReport {
  int agent = 0;
  Threshold tau_star;
  double worst_gap = 0.0;  // min over alternatives of J(tau_star) - J(alternative)
  bool pass = false;
};

struct EquilibriumPayoffReport {
  std::vector<AgentDeviationReport> agents;
  double worst_gap = 0.0;
  bool pass = false;
};

inline constexpr double kDeviationTolerance = 1e-12;

// Definition-2 check by exact payoffs (binary prior): for every agent and
// every alternative tau' in {Never, Finite{0..k_cap}}, the equilibrium
// threshold must not be worse than tau' by more than kDeviationTolerance.
inline EquilibriumPayoffReport verify_equilibrium_payoff(const GameParams& params,
                                                         const ThresholdProfile& profile,
                                                         int deviation_k_cap) {
  validate(params);
  check_profile(params, profile);
  const BinaryPrior& prior = params.binary_prior();
  if (deviation_k_cap < 0) {
    throw_validation("InvalidArgument", "deviation_k_cap must be nonnegative");
  }
  const double means[2] = {params.rate * prior.theta0, params.rate * prior.theta1};
  const double thetas[2] = {prior.theta0, prior.theta1};
  const double probs[2] = {prior.p0, prior.p1()};

  double totals[2] = {0.0, 0.0};
  for (const Threshold& t : profile) {
    totals[0] += detail::activation_cdf(t, means[0]);
    totals[1] += detail::activation_cdf(t, means[1]);
  }

  EquilibriumPayoffReport report;
  report.pass = true;
  report.worst_gap = std::numeric_limits<double>::infinity();
  for (int i = 0; i < params.n_agents; ++i) {
    const double own0 = detail::activation_cdf(profile[i], means[0]);
    const double own1 = detail::activation_cdf(profile[i], means[1]);
    const double gain0 = probs[0] * (totals[0] - own0 - thetas[0]);
    const double gain1 = probs[1] * (totals[1] - own1 - thetas[1]);
    const double star = own0 * gain0 + own1 * gain1;  // == exact_payoff_binary(params, i, profile)

    double best_alternative = 0.0;  // Never
    double f0 = 0.0;
    double f1 = 0.0;
    double term0 = std::exp(-means[0]);
    double term1 = std::exp(-means[1]);
    for (int tau = 0; tau <= deviation_k_cap; ++tau) {
      if (tau > 0) {
        term0 *= means[0] / tau;
        term1 *= means[1] / tau;
      }
      f0 = std::min(f0 + term0, 1.0);
      f1 = std::min(f1 + term1, 1.0);
      best_alternative = std::max(best_alternative, f0 * gain0 + f1 * gain1);
    }

    AgentDeviationReport agent_report;
    agent_report.agent = i;
    agent_report.tau_star = profile[i];
    agent_report.worst_gap = star - best_alternative;
    agent_report.pass = agent_report.worst_gap >= -kDeviationTolerance;
    report.worst_gap = std::min(report.worst_gap, agent_report.worst_gap);
    report.pass = report.pass && agent_report.pass;
    report.agents.push_back(agent_report);
  }
  return report;
}

// Monte-Carlo oracle for the uniform-model belief: Theta | Y_i = k is
// Gamma(shape k+1, scale 1/lambda), so sampling Theta then Y_j ~
// Poisson(lambda Theta) estimates P(Y_j <= tau | Y_i = k).
inline PayoffEstimate mc_conditional_belief_uniform(int k, int tau, double lambda, int64_t samples,
                                                    uint64_t seed) {
  if (k < 0 || tau < 0) {
    throw_validation("InvalidArgument", "k and tau must be nonnegative");
  }
  if (!(lambda > 0.0)) {
    throw_validation("InvalidRate", "lambda must be positive");
  }
  if (samples < 1) {
    throw_validation("InvalidArgument", "samples must be at least 1");
  }
  Rng rng(seed);
  detail::RunningStats stats;
  for (int64_t s = 0; s < samples; ++s) {
    const double theta = rng.gamma_integer_shape(k + 1, 1.0 / lambda);
    const int y = rng.poisson(lambda * theta);
    stats.add(y <= tau ? 1.0 : 0.0);
  }
  return stats.estimate();
}

}  // namespace pgg
