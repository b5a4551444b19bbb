#pragma once

#include <cassert>
#include <compare>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "pgg/errors.hpp"

namespace pgg {

// Two-point prior on the fundamental: Theta in {theta0, theta1} with
// P(Theta = theta0) = p0. p1 is always derived, never stored.
struct BinaryPrior {
  double theta0 = 0.0;
  double theta1 = 0.0;
  double p0 = 0.0;

  double p1() const { return 1.0 - p0; }
  double mean() const { return p0 * theta0 + p1() * theta1; }
};

// Improper uniform prior with density 1 on theta > 0. Carries no state;
// only conditional quantities are ever evaluated under it.
struct UniformPrior {};

using PriorSpec = std::variant<BinaryPrior, UniformPrior>;

// A complete game instance: N agents observing Y_i ~ Poisson(rate * Theta).
struct GameParams {
  int n_agents = 0;
  double rate = 0.0;
  PriorSpec prior;

  bool has_binary_prior() const { return std::holds_alternative<BinaryPrior>(prior); }

  const BinaryPrior& binary_prior() const {
    if (!has_binary_prior()) {
      throw_validation("WrongPrior", "operation requires the binary prior");
    }
    return std::get<BinaryPrior>(prior);
  }
};

// Per-agent policy parameter. Finite{tau} activates iff the observation
// k <= tau; Never and Always close the best-response map over the cases
// where no finite crossing exists (pi_i(0) < phi(0)) or the crossing is
// unbounded.
class Threshold {
 public:
  enum class Kind { kNever = 0, kFinite = 1, kAlways = 2 };

  constexpr Threshold() = default;  // Finite{0}

  static constexpr Threshold never() { return Threshold(Kind::kNever, 0); }
  static constexpr Threshold always() { return Threshold(Kind::kAlways, 0); }

  static Threshold finite(int tau) {
    if (tau < 0) {
      throw_validation("InvalidThreshold", "finite threshold must be a nonnegative integer");
    }
    return Threshold(Kind::kFinite, tau);
  }

  Kind kind() const { return kind_; }
  bool is_never() const { return kind_ == Kind::kNever; }
  bool is_finite() const { return kind_ == Kind::kFinite; }
  bool is_always() const { return kind_ == Kind::kAlways; }

  int tau() const {
    assert(is_finite());
    return tau_;
  }

  // Orders Never < Finite{0} < Finite{1} < ... < Always.
  friend auto operator<=>(const Threshold&, const Threshold&) = default;

  std::string to_string() const {
    switch (kind_) {
      case Kind::kNever: return "never";
      case Kind::kAlways: return "always";
      default: return std::to_string(tau_);
    }
  }

 private:
  constexpr Threshold(Kind kind, int tau) : kind_(kind), tau_(tau) {}

  Kind kind_ = Kind::kFinite;
  int tau_ = 0;
};

using ThresholdProfile = std::vector<Threshold>;

// gamma_i(k) = 1(k <= tau_i) for finite thresholds.
inline int policy_eval(Threshold t, int k) {
  assert(k >= 0);
  switch (t.kind()) {
    case Threshold::Kind::kNever: return 0;
    case Threshold::Kind::kAlways: return 1;
    default: return k <= t.tau() ? 1 : 0;
  }
}

// Checks the type invariants; reports the first violation by name.
inline void validate(const GameParams& params) {
  if (const auto* prior = std::get_if<BinaryPrior>(&params.prior)) {
    if (!(prior->theta0 > 0.0) || !(prior->theta1 > 0.0)) {
      throw_validation("InvalidTheta", "theta0 and theta1 must be positive");
    }
    if (!(prior->theta0 < prior->theta1)) {
      throw_validation("InvalidOrder", "requires 0 < theta0 < theta1");
    }
    if (!(prior->p0 > 0.0 && prior->p0 < 1.0)) {
      throw_validation("InvalidProbability", "p0 must lie in (0, 1)");
    }
  }
  if (!(params.rate > 0.0)) {
    throw_validation("InvalidRate", "rate must be positive");
  }
  if (params.n_agents < 2) {
    throw_validation("TooFewAgents", "the payoff sums over opponents; need n_agents >= 2");
  }
}

inline ThresholdProfile symmetric_profile(int n_agents, Threshold t) {
  return ThresholdProfile(static_cast<size_t>(n_agents), t);
}

inline bool is_symmetric(const ThresholdProfile& profile) {
  for (const Threshold& t : profile) {
    if (t != profile.front()) return false;
  }
  return true;
}

inline void check_profile(const GameParams& params, const ThresholdProfile& profile) {
  if (profile.size() != static_cast<size_t>(params.n_agents)) {
    throw_validation("InvalidProfile", "profile length must equal n_agents");
  }
}

inline void check_agent_index(const GameParams& params, int agent) {
  if (agent < 0 || agent >= params.n_agents) {
    throw_validation("InvalidAgent", "agent index out of range");
  }
}

}  // namespace pgg
