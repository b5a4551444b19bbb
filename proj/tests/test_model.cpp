#include <catch2/catch_amalgamated.hpp>

#include "pgg/model.hpp"
#include "test_helpers.hpp"

using namespace pgg;
using pgg::test::binary_game;
using pgg::test::error_name_of;
using pgg::test::uniform_game;

TEST_CASE("validate accepts the worked-example parameter sets", "[model]") {
  for (double p0 : {0.1, 0.2, 0.3, 0.4, 0.5}) {
    REQUIRE_NOTHROW(validate(test::reference_binary_game(p0)));
  }
  REQUIRE_NOTHROW(validate(uniform_game(100, 1.0)));
  for (int n : {10, 20, 30, 40, 50}) {
    REQUIRE_NOTHROW(validate(uniform_game(n, 1.0)));
  }
}

TEST_CASE("validate names the first violated invariant", "[model]") {
  REQUIRE(error_name_of([] { validate(uniform_game(1, 1.0)); }) == "TooFewAgents");
  REQUIRE(error_name_of([] { validate(binary_game(2, 1.0, 100.0, 50.0, 0.5)); }) ==
          "InvalidOrder");
  REQUIRE(error_name_of([] { validate(binary_game(2, 1.0, 50.0, 50.0, 0.5)); }) == "InvalidOrder");
  REQUIRE(error_name_of([] { validate(binary_game(2, 1.0, 50.0, 100.0, 0.0)); }) ==
          "InvalidProbability");
  REQUIRE(error_name_of([] { validate(binary_game(2, 1.0, 50.0, 100.0, 1.0)); }) ==
          "InvalidProbability");
  REQUIRE(error_name_of([] { validate(binary_game(2, 0.0, 50.0, 100.0, 0.5)); }) == "InvalidRate");
  REQUIRE(error_name_of([] { validate(binary_game(2, -1.0, 50.0, 100.0, 0.5)); }) ==
          "InvalidRate");
  REQUIRE(error_name_of([] { validate(binary_game(2, 1.0, -2.0, 100.0, 0.5)); }) ==
          "InvalidTheta");
  REQUIRE(error_name_of([] { validate(uniform_game(2, 0.0)); }) == "InvalidRate");

  const Error error(ErrorKind::kValidation, "InvalidRate", "msg");
  REQUIRE(error.kind() == ErrorKind::kValidation);
}

TEST_CASE("p1 is derived, never stored", "[model]") {
  const BinaryPrior prior{50.0, 100.0, 0.3};
  REQUIRE(prior.p1() == Catch::Approx(0.7).margin(1e-15));
  REQUIRE(prior.mean() == Catch::Approx(0.3 * 50 + 0.7 * 100).margin(1e-12));
}

TEST_CASE("policy_eval boundary behaviour", "[model]") {
  REQUIRE(policy_eval(Threshold::finite(5), 5) == 1);  // k = tau activates
  REQUIRE(policy_eval(Threshold::finite(5), 6) == 0);
  REQUIRE(policy_eval(Threshold::finite(0), 0) == 1);
  REQUIRE(policy_eval(Threshold::never(), 0) == 0);
  REQUIRE(policy_eval(Threshold::always(), 12345) == 1);
}

TEST_CASE("threshold policies are nonincreasing with a single flip at tau+1", "[model]") {
  for (int tau : {0, 1, 5, 17}) {
    const Threshold t = Threshold::finite(tau);
    int flips = 0;
    int prev = policy_eval(t, 0);
    REQUIRE(prev == 1);
    for (int k = 1; k <= 2 * tau + 3; ++k) {
      const int cur = policy_eval(t, k);
      REQUIRE(cur <= prev);
      if (cur != prev) {
        ++flips;
        REQUIRE(k == tau + 1);
      }
      prev = cur;
    }
    REQUIRE(flips == 1);
  }
}

TEST_CASE("threshold ordering and serialization text", "[model]") {
  REQUIRE(Threshold::never() < Threshold::finite(0));
  REQUIRE(Threshold::finite(0) < Threshold::finite(5));
  REQUIRE(Threshold::finite(5) < Threshold::always());
  REQUIRE(Threshold::finite(7) == Threshold::finite(7));
  REQUIRE(Threshold::never() == Threshold::never());
  REQUIRE(Threshold::never().to_string() == "never");
  REQUIRE(Threshold::always().to_string() == "always");
  REQUIRE(Threshold::finite(44).to_string() == "44");
  REQUIRE(error_name_of([] { Threshold::finite(-1); }) == "InvalidThreshold");
}

TEST_CASE("profile helpers", "[model]") {
  const ThresholdProfile sym = symmetric_profile(4, Threshold::finite(3));
  REQUIRE(sym.size() == 4);
  REQUIRE(is_symmetric(sym));
  ThresholdProfile mixed = sym;
  mixed[2] = Threshold::finite(4);
  REQUIRE_FALSE(is_symmetric(mixed));

  const GameParams params = uniform_game(4, 1.0);
  REQUIRE_NOTHROW(check_profile(params, sym));
  REQUIRE(error_name_of([&] { check_profile(params, ThresholdProfile(3)); }) ==
          "InvalidProfile");
  REQUIRE(error_name_of([&] { check_agent_index(params, 4); }) == "InvalidAgent");
}
