#pragma once

#include <cstdint>
#include <cstdio>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "pgg/equilibrium.hpp"
#include "pgg/errors.hpp"
#include "pgg/model.hpp"
#include "pgg/payoff.hpp"
#include "pgg/verify.hpp"

namespace pgg {

using Json = nlohmann::json;

// Fixed CSV number format; keeps emitted sweeps byte-reproducible.
inline std::string fmt_double(double value) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.12g", value);
  return buffer;
}

// --- thresholds -----------------------------------------------------------

// Wire form: nonnegative integer tau, or the strings "never" / "always".
inline Json threshold_to_json(Threshold t) {
  if (t.is_finite()) return Json(t.tau());
  return Json(t.to_string());
}

inline Threshold threshold_from_json(const Json& value) {
  if (value.is_number_integer()) {
    const int64_t tau = value.get<int64_t>();
    if (tau < 0) {
      throw_validation("InvalidConfig", "threshold must be a nonnegative integer");
    }
    return Threshold::finite(static_cast<int>(tau));
  }
  if (value.is_string()) {
    const std::string s = value.get<std::string>();
    if (s == "never") return Threshold::never();
    if (s == "always") return Threshold::always();
  }
  throw_validation("InvalidConfig",
                   "threshold must be a nonnegative integer, \"never\", or \"always\"");
}

inline Json profile_to_json(const ThresholdProfile& profile) {
  Json array = Json::array();
  for (const Threshold& t : profile) array.push_back(threshold_to_json(t));
  return array;
}

// --- config documents ------------------------------------------------------

// Flat key-value config with unknown-key rejection: every key must be
// consumed by the command that loads the document.
class ConfigReader {
 public:
  explicit ConfigReader(Json document) : doc_(std::move(document)) {
    if (!doc_.is_object()) {
      throw_validation("InvalidConfig", "config must be a JSON object");
    }
  }

  bool has(const std::string& key) const { return doc_.contains(key); }

  double require_double(const std::string& key) {
    const Json& v = fetch(key);
    if (!v.is_number()) bad_type(key, "number");
    return v.get<double>();
  }

  std::optional<double> optional_double(const std::string& key) {
    if (!has(key)) return std::nullopt;
    return require_double(key);
  }

  int require_int(const std::string& key) {
    const Json& v = fetch(key);
    if (!v.is_number_integer()) bad_type(key, "integer");
    return v.get<int>();
  }

  std::optional<int> optional_int(const std::string& key) {
    if (!has(key)) return std::nullopt;
    return require_int(key);
  }

  uint64_t require_u64(const std::string& key) {
    const Json& v = fetch(key);
    if (!(v.is_number_unsigned() || (v.is_number_integer() && v.get<int64_t>() >= 0))) {
      bad_type(key, "unsigned integer");
    }
    return v.get<uint64_t>();
  }

  std::optional<uint64_t> optional_u64(const std::string& key) {
    if (!has(key)) return std::nullopt;
    return require_u64(key);
  }

  std::string require_string(const std::string& key) {
    const Json& v = fetch(key);
    if (!v.is_string()) bad_type(key, "string");
    return v.get<std::string>();
  }

  std::optional<std::string> optional_string(const std::string& key) {
    if (!has(key)) return std::nullopt;
    return require_string(key);
  }

  Json require_array(const std::string& key) {
    const Json& v = fetch(key);
    if (!v.is_array()) bad_type(key, "array");
    return v;
  }

  std::optional<Json> optional_value(const std::string& key) {
    if (!has(key)) return std::nullopt;
    return fetch(key);
  }

  // Rejects anything the command did not consume.
  void finish() const {
    for (const auto& [key, value] : doc_.items()) {
      if (consumed_.count(key) == 0) {
        throw_validation("InvalidConfig", "unknown config key '" + key + "'");
      }
    }
  }

 private:
  const Json& fetch(const std::string& key) {
    if (!doc_.contains(key)) {
      throw_validation("InvalidConfig", "missing config key '" + key + "'");
    }
    consumed_.insert(key);
    return doc_.at(key);
  }

  [[noreturn]] void bad_type(const std::string& key, const std::string& expected) {
    throw_validation("InvalidConfig", "config key '" + key + "' must be a " + expected);
  }

  Json doc_;
  std::set<std::string> consumed_;
};

// {n_agents, rate, prior.kind, prior.theta0, prior.theta1, prior.p0}
inline GameParams parse_game_params(ConfigReader& reader) {
  GameParams params;
  params.n_agents = reader.require_int("n_agents");
  params.rate = reader.require_double("rate");
  const std::string kind = reader.require_string("prior.kind");
  if (kind == "binary") {
    BinaryPrior prior;
    prior.theta0 = reader.require_double("prior.theta0");
    prior.theta1 = reader.require_double("prior.theta1");
    prior.p0 = reader.require_double("prior.p0");
    params.prior = prior;
  } else if (kind == "uniform") {
    params.prior = UniformPrior{};
  } else {
    throw_validation("InvalidConfig", "prior.kind must be \"binary\" or \"uniform\"");
  }
  return params;
}

inline Json game_params_to_json(const GameParams& params) {
  Json doc;
  doc["n_agents"] = params.n_agents;
  doc["rate"] = params.rate;
  if (params.has_binary_prior()) {
    const BinaryPrior& prior = params.binary_prior();
    doc["prior.kind"] = "binary";
    doc["prior.theta0"] = prior.theta0;
    doc["prior.theta1"] = prior.theta1;
    doc["prior.p0"] = prior.p0;
  } else {
    doc["prior.kind"] = "uniform";
  }
  return doc;
}

// "init": either one threshold applied to every agent or an array of N.
inline ThresholdProfile parse_profile_value(const Json& value, int n_agents) {
  if (value.is_array()) {
    if (value.size() != static_cast<size_t>(n_agents)) {
      throw_validation("InvalidConfig", "profile array length must equal n_agents");
    }
    ThresholdProfile profile;
    profile.reserve(n_agents);
    for (const Json& entry : value) profile.push_back(threshold_from_json(entry));
    return profile;
  }
  return symmetric_profile(n_agents, threshold_from_json(value));
}

inline Schedule schedule_from_string(const std::string& name) {
  if (name == "sequential") return Schedule::kSequential;
  if (name == "simultaneous") return Schedule::kSimultaneous;
  throw_validation("InvalidConfig", "schedule must be \"sequential\" or \"simultaneous\"");
}

// --- result documents -------------------------------------------------------

inline Json existence_report_to_json(const ExistenceReport& report) {
  Json doc;
  const auto condition = [](const ExistenceCondition& c, const char* field) {
    Json j;
    j["satisfied"] = c.satisfied;
    j[field] = c.margin;
    return j;
  };
  if (report.condition_theta1) doc["condition_theta1"] = condition(*report.condition_theta1, "margin");
  if (report.condition_lambda) doc["condition_lambda"] = condition(*report.condition_lambda, "value");
  if (report.condition_rate) doc["condition_rate"] = condition(*report.condition_rate, "margin");
  doc["overall"] = report.overall;
  return doc;
}

inline Json trace_to_json(const DynamicsTrace& trace) {
  Json iterations = Json::array();
  for (const ThresholdProfile& profile : trace.iterations) {
    iterations.push_back(profile_to_json(profile));
  }
  return iterations;
}

inline Json payoff_estimate_to_json(const PayoffEstimate& estimate) {
  Json doc;
  doc["mean"] = estimate.mean;
  doc["half_width_95"] = estimate.half_width_95;
  doc["samples"] = estimate.samples;
  return doc;
}

// {agent, tau_star, worst_deviation_gap, pass} per agent.
inline Json deviation_report_to_json(const EquilibriumPayoffReport& report) {
  Json agents = Json::array();
  for (const AgentDeviationReport& agent : report.agents) {
    Json row;
    row["agent"] = agent.agent;
    row["tau_star"] = threshold_to_json(agent.tau_star);
    row["worst_deviation_gap"] = agent.worst_gap;
    row["pass"] = agent.pass;
    agents.push_back(row);
  }
  Json doc;
  doc["agents"] = agents;
  doc["worst_gap"] = report.worst_gap;
  doc["pass"] = report.pass;
  return doc;
}

inline Json family_results_to_json(const std::vector<FamilyResult>& results) {
  Json families = Json::array();
  bool overall = true;
  for (const FamilyResult& family : results) {
    Json row;
    row["name"] = family.name;
    row["checked"] = family.checked;
    row["failures"] = family.failures;
    row["pass"] = family.pass;
    if (!family.detail.empty()) row["detail"] = family.detail;
    families.push_back(row);
    overall = overall && family.pass;
  }
  Json doc;
  doc["families"] = families;
  doc["overall"] = overall;
  return doc;
}

// --- CSV emitters -----------------------------------------------------------

inline void write_belief_curve_csv(std::ostream& out, const BeliefCurve& curve) {
  out << "k,phi,pi\n";
  for (int k = 0; k <= curve.k_max; ++k) {
    out << k << ',' << fmt_double(curve.phi[k]) << ',' << fmt_double(curve.pi[k]) << '\n';
  }
}

// Rows `n_agents,tau_star,frequency`. Converged profiles are kept exact in
// the histogram; emission requires them symmetric so tau_star is
// well-defined.
inline void write_histogram_csv(std::ostream& out,
                                const std::vector<std::pair<int, EquilibriumHistogram>>& rows) {
  out << "n_agents,tau_star,frequency\n";
  for (const auto& [n_agents, histogram] : rows) {
    for (const EquilibriumHistogram::Entry& entry : histogram.entries) {
      if (!is_symmetric(entry.profile)) {
        throw_numerical("AsymmetricEquilibrium",
                        "histogram entry is not a symmetric profile; no scalar tau_star");
      }
      out << n_agents << ',' << entry.profile.front().to_string() << ',' << entry.count << '\n';
    }
  }
}

inline void write_table_csv(std::ostream& out,
                            const std::vector<std::pair<double, Threshold>>& rows) {
  out << "p0,tau_star\n";
  for (const auto& [p0, tau] : rows) {
    out << fmt_double(p0) << ',' << tau.to_string() << '\n';
  }
}

}  // namespace pgg
