#pragma once

#include <cmath>
#include <optional>
#include <string>

#include "pgg/beliefs.hpp"
#include "pgg/errors.hpp"
#include "pgg/model.hpp"

namespace pgg {

struct BestResponseResult {
  Threshold threshold;
  std::optional<int> crossing_k;  // last k with pi_i(k) >= phi(k)
  int k_cap_used = 0;
};

namespace detail {

inline constexpr double kCapMargin = 1e-12;
inline constexpr long long kCapHardStop = 1LL << 26;

// Smallest k with phi(k) > opponent_limit + margin (binary prior). phi is
// strictly increasing with limit theta1, so the doubling phase terminates
// whenever the limit condition holds.
inline int binary_cap(const GameParams& params, const BeliefEvaluator& eval) {
  const double limit = eval.opponent_limit() + kCapMargin;
  if (!(limit < params.binary_prior().theta1)) {
    throw_numerical("NoFiniteCap",
                    "sum of opponent activation limits reaches theta1; no finite "
                    "crossing bound exists (degenerate/Always regime)");
  }
  if (eval.phi_at(0) > limit) return 0;
  long long lo = 0;  // phi(lo) <= limit
  long long hi = 1;
  while (eval.phi_at(static_cast<int>(hi)) <= limit) {
    lo = hi;
    hi *= 2;
    if (hi > kCapHardStop) {
      throw_numerical("NoFiniteCap", "crossing bound search exceeded hard stop");
    }
  }
  while (hi - lo > 1) {
    const long long mid = lo + (hi - lo) / 2;
    if (eval.phi_at(static_cast<int>(mid)) > limit) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return static_cast<int>(hi);
}

inline int uniform_cap(const GameParams& params) {
  // Beyond ceil(rate * (N-1)): phi(k) = (k+1)/rate > N-1 >= pi_i(k).
  return static_cast<int>(std::ceil(params.rate * (params.n_agents - 1)));
}

inline int k_cap_impl(const GameParams& params, const BeliefEvaluator& eval) {
  return params.has_binary_prior() ? binary_cap(params, eval) : uniform_cap(params);
}

}  // namespace detail

// Finite search bound for the activation set {k : pi_i(k) >= phi(k)}.
inline int k_cap(const GameParams& params, const ThresholdProfile& profile, int agent) {
  validate(params);
  BeliefEvaluator eval(params, agent, profile);
  return detail::k_cap_impl(params, eval);
}

namespace detail {

inline BestResponseResult best_response_impl(const GameParams& params,
                                             const BeliefEvaluator& eval) {
  long long cap = k_cap_impl(params, eval);
  // The cap from the limit comparison does not always dominate the last
  // crossing (pi can sit well above its limit while phi has already passed
  // it), so extend until the curves have actually separated. pi is
  // nonincreasing and phi increasing, so any k with pi(k) < phi(k) bounds
  // the activation set.
  while (eval.pi_at(static_cast<int>(cap)) >= eval.phi_at(static_cast<int>(cap))) {
    cap = cap * 2 + 1;
    if (cap > kCapHardStop) {
      throw_numerical("NoFiniteCap", "activation set has no finite bound");
    }
  }

  BestResponseResult result;
  result.k_cap_used = static_cast<int>(cap);
  bool prefix_ended = false;
  for (int k = 0; k <= cap; ++k) {
    const bool active = eval.pi_at(k) >= eval.phi_at(k);  // ties activate
    if (active) {
      if (prefix_ended) {
        throw_numerical("SingleCrossingViolated",
                        "activation set is not a prefix: re-entry at k=" + std::to_string(k));
      }
      result.crossing_k = k;
    } else {
      prefix_ended = true;
    }
  }
  result.threshold =
      result.crossing_k.has_value() ? Threshold::finite(*result.crossing_k) : Threshold::never();
  return result;
}

}  // namespace detail

// Best response of `agent` to the thresholds of everyone else in `profile`
// (the agent's own entry is ignored). Returns Finite{k*} with
// k* = max{k : pi_i(k) >= phi(k)} when the set is nonempty, Never otherwise.
// The scan doubles as a monotonicity audit: a non-prefix activation set
// would falsify the single-crossing theorems and raises
// SingleCrossingViolated.
inline BestResponseResult best_response(const GameParams& params, int agent,
                                        const ThresholdProfile& profile,
                                        BeliefWorkspace* workspace = nullptr) {
  validate(params);
  BeliefEvaluator eval(params, agent, profile, workspace);
  return detail::best_response_impl(params, eval);
}

}  // namespace pgg
