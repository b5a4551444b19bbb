#pragma once

// Umbrella header: Bayesian Nash equilibria in pure threshold strategies
// for N-agent global games with Poisson private observations.

#include "pgg/beliefs.hpp"
#include "pgg/best_response.hpp"
#include "pgg/equilibrium.hpp"
#include "pgg/errors.hpp"
#include "pgg/model.hpp"
#include "pgg/payoff.hpp"
#include "pgg/rng.hpp"
#include "pgg/serialization.hpp"
#include "pgg/verify.hpp"
