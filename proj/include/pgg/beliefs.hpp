#pragma once

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "pgg/errors.hpp"
#include "pgg/model.hpp"

namespace pgg {

// Strict monotonicity of phi and pi holds analytically; numerically it is
// asserted up to this slack, which absorbs rounding ties once the posterior
// saturates.
inline constexpr double kMonotoneSlack = 1e-14;

// F_tau(mean) = sum_{m=0}^{tau} mean^m e^{-mean} / m!, by term recurrence.
inline double poisson_cdf(int tau, double mean) {
  if (!(mean >= 0.0)) {
    throw_validation("NegativeMean", "Poisson mean must be nonnegative");
  }
  assert(tau >= 0);
  double term = std::exp(-mean);
  double sum = term;
  for (int m = 0; m < tau; ++m) {
    term *= mean / (m + 1);
    sum += term;
  }
  return std::min(sum, 1.0);
}

// Posterior P(Theta = theta_m | Y_i = k) under the binary prior.
struct PosteriorWeights {
  double w0 = 0.0;
  double w1 = 0.0;
};

// Bayes update in the log domain: w_m proportional to
// p_m exp(k ln(lambda theta_m) - lambda theta_m). The max exponent is
// subtracted before exponentiation so any k is in range.
inline PosteriorWeights posterior_binary(const GameParams& params, int k) {
  assert(k >= 0);
  const BinaryPrior& prior = params.binary_prior();
  const double m0 = params.rate * prior.theta0;
  const double m1 = params.rate * prior.theta1;
  const double l0 = std::log(prior.p0) + k * std::log(m0) - m0;
  const double l1 = std::log(prior.p1()) + k * std::log(m1) - m1;
  const double top = std::max(l0, l1);
  const double e0 = std::exp(l0 - top);
  const double e1 = std::exp(l1 - top);
  return PosteriorWeights{e0 / (e0 + e1), e1 / (e0 + e1)};
}

// phi(k) = E[Theta | Y_i = k].
inline double phi(const GameParams& params, int k) {
  assert(k >= 0);
  if (params.has_binary_prior()) {
    const BinaryPrior& prior = params.binary_prior();
    const PosteriorWeights w = posterior_binary(params, k);
    return w.w0 * prior.theta0 + w.w1 * prior.theta1;
  }
  return (k + 1) / params.rate;
}

namespace detail {

// Predictive terms of the uniform model:
//   term(k, m) = 2^{-(m+k+1)} C(k+m, k),
// built multiplicatively; no explicit factorials, so k and tau up to ~1e3
// stay within double range.
inline double uniform_first_term(int k) { return std::ldexp(1.0, -(k + 1)); }

inline double uniform_next_term(double term, int k, int m_next) {
  return term * (static_cast<double>(k) + m_next) / (2.0 * m_next);
}

// P(Y_j <= tau | Y_i = k) under the uniform prior.
inline double uniform_predictive_cdf(int k, int tau) {
  double term = uniform_first_term(k);
  double sum = term;
  for (int m = 1; m <= tau; ++m) {
    term = uniform_next_term(term, k, m);
    sum += term;
  }
  return std::min(sum, 1.0);
}

}  // namespace detail

// Shared caches keyed on one GameParams instance: Poisson CDF pairs per
// distinct tau (binary) and cumulative predictive sums per (k, tau)
// (uniform). One workspace per dynamics run keeps a full sweep at
// O(K_max * max tau) amortized. Not safe for concurrent mutation; use one
// per worker.
class BeliefWorkspace {
 public:
  explicit BeliefWorkspace(const GameParams& params) : params_(params) {
    if (params.has_binary_prior()) {
      mean0_ = params.rate * params.binary_prior().theta0;
      mean1_ = params.rate * params.binary_prior().theta1;
    }
  }

  const GameParams& params() const { return params_; }

  // (F_tau(lambda theta0), F_tau(lambda theta1))
  std::pair<double, double> binary_cdfs(int tau) {
    auto it = cdf_by_tau_.find(tau);
    if (it != cdf_by_tau_.end()) return it->second;
    std::pair<double, double> value{poisson_cdf(tau, mean0_), poisson_cdf(tau, mean1_)};
    cdf_by_tau_.emplace(tau, value);
    return value;
  }

  // sum_{m=0}^{tau} 2^{-(m+k+1)} C(k+m, k)
  double uniform_cumulative(int k, int tau) {
    if (static_cast<size_t>(k) >= rows_.size()) {
      rows_.resize(k + 1);
      last_term_.resize(k + 1, 0.0);
    }
    std::vector<double>& row = rows_[k];
    if (row.empty()) {
      row.reserve(tau + 1);
      row.push_back(detail::uniform_first_term(k));
      last_term_[k] = row[0];
    }
    while (static_cast<int>(row.size()) <= tau) {
      const int m = static_cast<int>(row.size());
      last_term_[k] = detail::uniform_next_term(last_term_[k], k, m);
      row.push_back(row.back() + last_term_[k]);
    }
    return std::min(row[tau], 1.0);
  }

 private:
  GameParams params_;
  double mean0_ = 0.0;
  double mean1_ = 0.0;
  std::unordered_map<int, std::pair<double, double>> cdf_by_tau_;
  std::vector<std::vector<double>> rows_;
  std::vector<double> last_term_;
};

// pi_ij(k) = P(Y_j <= tau_j | Y_i = k), extended to the degenerate policies
// by pi_ij = 0 (Never) and pi_ij = 1 (Always).
//
// Binary prior: computed as w0(k) F_tau(lambda theta0) + w1(k) F_tau(lambda
// theta1) rather than as the textbook single ratio of power sums; the two are
// algebraically identical, but this form works in the log domain and cannot
// overflow.
inline double pi_ij(const GameParams& params, int k, Threshold tau_j) {
  assert(k >= 0);
  if (tau_j.is_never()) return 0.0;
  if (tau_j.is_always()) return 1.0;
  if (params.has_binary_prior()) {
    const PosteriorWeights w = posterior_binary(params, k);
    const double m0 = params.rate * params.binary_prior().theta0;
    const double m1 = params.rate * params.binary_prior().theta1;
    return std::min(1.0, w.w0 * poisson_cdf(tau_j.tau(), m0) + w.w1 * poisson_cdf(tau_j.tau(), m1));
  }
  return detail::uniform_predictive_cdf(k, tau_j.tau());
}

// Evaluates phi(k) and pi_i(k) for one agent against a fixed opponent
// profile. Opponents are bucketed by distinct threshold up front, so each
// pi_at(k) costs O(1) for the binary prior and O(distinct taus) for the
// uniform prior once the workspace row for k exists.
class BeliefEvaluator {
 public:
  BeliefEvaluator(const GameParams& params, int agent, const ThresholdProfile& profile,
                  BeliefWorkspace* workspace = nullptr)
      : params_(params), agent_(agent) {
    check_profile(params, profile);
    check_agent_index(params, agent);
    if (workspace == nullptr) {
      owned_ = std::make_unique<BeliefWorkspace>(params);
      workspace = owned_.get();
    }
    workspace_ = workspace;

    std::map<int, int> counts;
    for (int j = 0; j < params.n_agents; ++j) {
      if (j == agent) continue;
      const Threshold t = profile[j];
      if (t.is_always()) {
        ++n_always_;
      } else if (t.is_finite()) {
        ++counts[t.tau()];
      }
    }
    finite_counts_.assign(counts.begin(), counts.end());

    if (params.has_binary_prior()) {
      const BinaryPrior& prior = params.binary_prior();
      log_m0_ = std::log(params.rate * prior.theta0);
      log_m1_ = std::log(params.rate * prior.theta1);
      log_prior0_ = std::log(prior.p0) - params.rate * prior.theta0;
      log_prior1_ = std::log(prior.p1()) - params.rate * prior.theta1;
      for (const auto& [tau, count] : finite_counts_) {
        const auto [f0, f1] = workspace_->binary_cdfs(tau);
        sum_f0_ += count * f0;
        sum_f1_ += count * f1;
      }
    }
  }

  int agent() const { return agent_; }
  int n_opponents() const { return params_.n_agents - 1; }

  double phi_at(int k) const {
    if (!params_.has_binary_prior()) return (k + 1) / params_.rate;
    const BinaryPrior& prior = params_.binary_prior();
    const PosteriorWeights w = weights_at(k);
    return w.w0 * prior.theta0 + w.w1 * prior.theta1;
  }

  double pi_at(int k) const {
    double acc;
    if (params_.has_binary_prior()) {
      const PosteriorWeights w = weights_at(k);
      acc = n_always_ + w.w0 * sum_f0_ + w.w1 * sum_f1_;
    } else {
      acc = static_cast<double>(n_always_);
      for (const auto& [tau, count] : finite_counts_) {
        acc += count * workspace_->uniform_cumulative(k, tau);
      }
    }
    return std::min(acc, static_cast<double>(n_opponents()));
  }

  // lim_{k -> inf} pi_i(k): the posterior concentrates on theta1 (binary) /
  // escapes to +inf (uniform), so finite opponents contribute
  // F_tau(lambda theta1) and 0 respectively.
  double opponent_limit() const {
    if (params_.has_binary_prior()) return n_always_ + sum_f1_;
    return static_cast<double>(n_always_);
  }

 private:
  PosteriorWeights weights_at(int k) const {
    const double l0 = log_prior0_ + k * log_m0_;
    const double l1 = log_prior1_ + k * log_m1_;
    const double top = std::max(l0, l1);
    const double e0 = std::exp(l0 - top);
    const double e1 = std::exp(l1 - top);
    return PosteriorWeights{e0 / (e0 + e1), e1 / (e0 + e1)};
  }

  GameParams params_;
  int agent_ = 0;
  int n_always_ = 0;
  std::vector<std::pair<int, int>> finite_counts_;
  double sum_f0_ = 0.0;
  double sum_f1_ = 0.0;
  double log_m0_ = 0.0;
  double log_m1_ = 0.0;
  double log_prior0_ = 0.0;
  double log_prior1_ = 0.0;
  std::unique_ptr<BeliefWorkspace> owned_;
  BeliefWorkspace* workspace_ = nullptr;
};

// pi_i(k) = sum_{j != i} pi_ij(k).
inline double pi_i(const GameParams& params, int agent, const ThresholdProfile& profile, int k,
                   BeliefWorkspace* workspace = nullptr) {
  return BeliefEvaluator(params, agent, profile, workspace).pi_at(k);
}

// Tabulated phi and pi over k = 0..k_max for one agent.
struct BeliefCurve {
  int agent = 0;
  int k_max = 0;
  std::vector<double> phi;  // strictly increasing
  std::vector<double> pi;   // nonincreasing, within [0, N-1]
};

inline BeliefCurve belief_curve(const GameParams& params, int agent,
                                const ThresholdProfile& profile, int k_max,
                                BeliefWorkspace* workspace = nullptr) {
  if (k_max < 0) {
    throw_validation("InvalidArgument", "k_max must be nonnegative");
  }
  BeliefEvaluator eval(params, agent, profile, workspace);
  BeliefCurve curve;
  curve.agent = agent;
  curve.k_max = k_max;
  curve.phi.resize(k_max + 1);
  curve.pi.resize(k_max + 1);
  for (int k = 0; k <= k_max; ++k) {
    curve.phi[k] = eval.phi_at(k);
    curve.pi[k] = eval.pi_at(k);
  }
  const double hi = params.n_agents - 1.0;
  for (int k = 0; k <= k_max; ++k) {
    if (curve.pi[k] < -kMonotoneSlack || curve.pi[k] > hi + hi * kMonotoneSlack + kMonotoneSlack) {
      throw_numerical("BeliefInvariantViolated", "pi out of [0, N-1] at k=" + std::to_string(k));
    }
    if (k == 0) continue;
    if (!(curve.phi[k] - curve.phi[k - 1] > -kMonotoneSlack * std::abs(curve.phi[k]))) {
      throw_numerical("BeliefInvariantViolated", "phi not increasing at k=" + std::to_string(k));
    }
    if (!(curve.pi[k - 1] - curve.pi[k] >= -kMonotoneSlack * (1.0 + curve.pi[k]))) {
      throw_numerical("BeliefInvariantViolated", "pi not decreasing at k=" + std::to_string(k));
    }
  }
  return curve;
}

}  // namespace pgg
