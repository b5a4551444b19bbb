// pgg — command-line front end: equilibrium solving, the worked-example
// table, multiplicity and existence-condition sweeps, payoff evaluation,
// and the numerical verification suite. Emits CSV for plot data and JSON
// for structured results; every stochastic command is reproducible from
// (config, seed).

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pgg/pgg.hpp"

namespace {

using pgg::ConfigReader;
using pgg::Json;

struct CommonArgs {
  std::string config_path;
  std::optional<std::string> out_path;
  std::optional<uint64_t> seed;
  std::optional<std::string> schedule;
};

Json load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    pgg::throw_validation("IoError", "cannot open config file '" + path + "'");
  }
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& error) {
    pgg::throw_validation("InvalidConfig", std::string("config is not valid JSON: ") + error.what());
  }
}

void write_output(const std::optional<std::string>& out_path, const std::string& content) {
  if (!out_path) {
    std::cout << content;
    return;
  }
  std::ofstream out(*out_path, std::ios::binary);
  if (!out) {
    pgg::throw_validation("IoError", "cannot open output file '" + *out_path + "'");
  }
  out << content;
}

void write_json(const std::optional<std::string>& out_path, const Json& doc) {
  write_output(out_path, doc.dump(2) + "\n");
}

uint64_t resolve_seed(const CommonArgs& args, ConfigReader& reader) {
  if (args.seed) {
    reader.optional_u64("seed");  // consume; the flag overrides
    return *args.seed;
  }
  const std::optional<uint64_t> from_config = reader.optional_u64("seed");
  if (!from_config) {
    pgg::throw_validation("InvalidConfig",
                          "stochastic commands need a seed (config key \"seed\" or --seed)");
  }
  return *from_config;
}

// --- solve ------------------------------------------------------------------

int cmd_solve(const CommonArgs& args) {
  ConfigReader reader(load_config(args.config_path));
  pgg::GameParams params = pgg::parse_game_params(reader);
  const std::optional<Json> init_value = reader.optional_value("init");
  const std::string schedule_name =
      args.schedule.value_or(reader.optional_string("schedule").value_or("sequential"));
  const int max_sweeps = reader.optional_int("max_sweeps").value_or(500);
  const std::optional<std::string> curve_out = reader.optional_string("belief_curve_out");
  const std::optional<int> curve_k_max = reader.optional_int("belief_curve_k_max");
  reader.finish();
  pgg::validate(params);

  const pgg::Schedule schedule = pgg::schedule_from_string(schedule_name);
  const pgg::ThresholdProfile init =
      init_value ? pgg::parse_profile_value(*init_value, params.n_agents)
                 : pgg::symmetric_profile(params.n_agents, pgg::Threshold::finite(0));

  pgg::BeliefWorkspace workspace(params);
  const pgg::DynamicsTrace trace = pgg::br_dynamics(params, init, schedule, max_sweeps, &workspace);
  const pgg::ThresholdProfile& final_profile = trace.iterations.back();

  Json doc;
  doc["command"] = "solve";
  doc["converged"] = trace.converged;
  doc["sweeps_used"] = trace.sweeps_used;
  doc["schedule"] = pgg::schedule_name(trace.schedule);
  doc["profile"] = pgg::profile_to_json(final_profile);
  doc["fixed_point"] = trace.converged && pgg::is_equilibrium(params, final_profile, &workspace);
  doc["existence"] = pgg::existence_report_to_json(pgg::check_existence(params));
  doc["trace"] = pgg::trace_to_json(trace);
  write_json(args.out_path, doc);

  if (curve_out) {
    const int k_max = curve_k_max.value_or(pgg::k_cap(params, final_profile, 0));
    const pgg::BeliefCurve curve =
        pgg::belief_curve(params, 0, final_profile, k_max, &workspace);
    std::ostringstream csv;
    pgg::write_belief_curve_csv(csv, curve);
    write_output(curve_out, csv.str());
  }
  return 0;
}

// --- table1 -----------------------------------------------------------------

// Worked-example sweep: N=100, theta0=50, theta1=100, rate=1e-3, sequential
// dynamics from the all-Finite{0} profile, one row per p0.
int cmd_table1(const CommonArgs& args) {
  std::vector<std::pair<double, pgg::Threshold>> rows;
  for (const double p0 : {0.1, 0.2, 0.3, 0.4, 0.5}) {
    pgg::GameParams params;
    params.n_agents = 100;
    params.rate = 1e-3;
    params.prior = pgg::BinaryPrior{50.0, 100.0, p0};
    const pgg::DynamicsTrace trace =
        pgg::br_dynamics(params, pgg::symmetric_profile(100, pgg::Threshold::finite(0)),
                         pgg::Schedule::kSequential);
    if (!trace.converged) {
      pgg::throw_numerical("NotConverged", "table row did not converge");
    }
    const pgg::ThresholdProfile& profile = trace.iterations.back();
    if (!pgg::is_symmetric(profile)) {
      pgg::throw_numerical("AsymmetricEquilibrium", "table row converged asymmetric");
    }
    rows.emplace_back(p0, profile.front());
  }
  std::ostringstream csv;
  pgg::write_table_csv(csv, rows);
  write_output(args.out_path, csv.str());
  return 0;
}

// --- multiplicity -----------------------------------------------------------

int cmd_multiplicity(const CommonArgs& args) {
  ConfigReader reader(load_config(args.config_path));
  const double rate = reader.require_double("rate");
  const std::string kind = reader.optional_string("prior.kind").value_or("uniform");
  pgg::PriorSpec prior;
  if (kind == "binary") {
    prior = pgg::BinaryPrior{reader.require_double("prior.theta0"),
                             reader.require_double("prior.theta1"),
                             reader.require_double("prior.p0")};
  } else if (kind == "uniform") {
    prior = pgg::UniformPrior{};
  } else {
    pgg::throw_validation("InvalidConfig", "prior.kind must be \"binary\" or \"uniform\"");
  }
  const Json n_list = reader.require_array("n_agents_list");
  const int runs = reader.require_int("runs");
  const double init_p = reader.require_double("init_geometric_p");
  const int max_sweeps = reader.optional_int("max_sweeps").value_or(500);
  const uint64_t seed = resolve_seed(args, reader);
  reader.finish();

  std::vector<std::pair<int, pgg::EquilibriumHistogram>> results;
  for (const Json& entry : n_list) {
    if (!entry.is_number_integer()) {
      pgg::throw_validation("InvalidConfig", "n_agents_list must contain integers");
    }
    const int n = entry.get<int>();
    pgg::GameParams params;
    params.n_agents = n;
    params.rate = rate;
    params.prior = prior;
    pgg::validate(params);
    const uint64_t n_seed = pgg::substream_seed(seed, static_cast<uint64_t>(n));
    results.emplace_back(n,
                         pgg::multiplicity_experiment(params, runs, init_p, n_seed, max_sweeps));
  }
  std::ostringstream csv;
  pgg::write_histogram_csv(csv, results);
  write_output(args.out_path, csv.str());
  return 0;
}

// --- conditions ---------------------------------------------------------------

// Existence-condition sweep over a log-spaced lambda grid: for the binary
// prior, g(lambda), the theta1 margin, and a direct crossing predicate
// (pi_i(0) >= phi(0) at the all-Finite{0} opponent profile together with
// the limit condition); for the uniform prior, the rate margin.
int cmd_conditions(const CommonArgs& args) {
  ConfigReader reader(load_config(args.config_path));
  const int n_agents = reader.require_int("n_agents");
  const std::string kind = reader.require_string("prior.kind");
  const double lambda_min = reader.require_double("lambda_min");
  const double lambda_max = reader.require_double("lambda_max");
  const int lambda_points = reader.require_int("lambda_points");
  if (!(lambda_min > 0.0) || !(lambda_max >= lambda_min) || lambda_points < 1) {
    pgg::throw_validation("InvalidConfig", "lambda grid must satisfy 0 < min <= max, points >= 1");
  }
  std::vector<double> lambdas;
  for (int i = 0; i < lambda_points; ++i) {
    const double t = lambda_points == 1 ? 0.0 : static_cast<double>(i) / (lambda_points - 1);
    lambdas.push_back(std::exp(std::log(lambda_min) +
                               t * (std::log(lambda_max) - std::log(lambda_min))));
  }

  std::ostringstream csv;
  if (kind == "binary") {
    const double theta0 = reader.require_double("prior.theta0");
    const double theta1 = reader.require_double("prior.theta1");
    const Json p0_list = reader.require_array("p0_list");
    reader.finish();
    csv << "lambda,p0,g,theta1_margin,crossing_exists\n";
    for (const double lambda : lambdas) {
      for (const Json& p0_entry : p0_list) {
        if (!p0_entry.is_number()) {
          pgg::throw_validation("InvalidConfig", "p0_list must contain numbers");
        }
        const double p0 = p0_entry.get<double>();
        pgg::GameParams params;
        params.n_agents = n_agents;
        params.rate = lambda;
        params.prior = pgg::BinaryPrior{theta0, theta1, p0};
        pgg::validate(params);
        const double g = pgg::g_lambda(params.binary_prior(), n_agents, lambda);
        const double margin = theta1 - (n_agents - 1.0);
        const pgg::ThresholdProfile zeros =
            pgg::symmetric_profile(n_agents, pgg::Threshold::finite(0));
        const bool crossing =
            pgg::pi_i(params, 0, zeros, 0) >= pgg::phi(params, 0) && margin > 0.0;
        csv << pgg::fmt_double(lambda) << ',' << pgg::fmt_double(p0) << ','
            << pgg::fmt_double(g) << ',' << pgg::fmt_double(margin) << ','
            << (crossing ? 1 : 0) << '\n';
      }
    }
  } else if (kind == "uniform") {
    reader.finish();
    if (n_agents < 2) {
      pgg::throw_validation("TooFewAgents", "need n_agents >= 2");
    }
    csv << "lambda,rate_margin,condition_rate\n";
    for (const double lambda : lambdas) {
      const double margin = lambda - 2.0 / (n_agents - 1.0);
      csv << pgg::fmt_double(lambda) << ',' << pgg::fmt_double(margin) << ','
          << (margin > 0.0 ? 1 : 0) << '\n';
    }
  } else {
    pgg::throw_validation("InvalidConfig", "prior.kind must be \"binary\" or \"uniform\"");
  }
  write_output(args.out_path, csv.str());
  return 0;
}

// --- verify -------------------------------------------------------------------

int cmd_verify(const CommonArgs& args) {
  ConfigReader reader(args.config_path.empty() ? Json::object() : load_config(args.config_path));
  pgg::VerifyOptions options;
  options.seed = resolve_seed(args, reader);
  options.draws = reader.optional_int("draws").value_or(options.draws);
  options.k_range = reader.optional_int("k_range").value_or(options.k_range);
  options.identity_eps = reader.optional_double("identity_eps").value_or(options.identity_eps);
  options.derivative_rel_tol =
      reader.optional_double("derivative_rel_tol").value_or(options.derivative_rel_tol);
  options.oracle_tol = reader.optional_double("oracle_tol").value_or(options.oracle_tol);
  if (const auto samples = reader.optional_int("mc_samples")) options.mc_samples = *samples;
  options.payoff_instances =
      reader.optional_int("payoff_instances").value_or(options.payoff_instances);
  if (const auto families = reader.optional_value("families")) {
    if (!families->is_array()) {
      pgg::throw_validation("InvalidConfig", "families must be an array of names");
    }
    for (const Json& name : *families) options.families.push_back(name.get<std::string>());
  }
  reader.finish();

  const std::vector<pgg::FamilyResult> results = pgg::run_verification_suite(options);
  Json doc = pgg::family_results_to_json(results);
  doc["command"] = "verify";
  doc["seed"] = options.seed;
  write_json(args.out_path, doc);
  return doc["overall"].get<bool>() ? 0 : 2;
}

// --- payoff -------------------------------------------------------------------

int cmd_payoff(const CommonArgs& args) {
  ConfigReader reader(load_config(args.config_path));
  pgg::GameParams params = pgg::parse_game_params(reader);
  const Json profile_value = reader.optional_value("profile").value_or(Json());
  if (profile_value.is_null()) {
    pgg::throw_validation("InvalidConfig", "missing config key 'profile'");
  }
  const int agent = reader.optional_int("agent").value_or(0);
  const std::optional<int> samples = reader.optional_int("samples");
  const bool verify_deviations = reader.optional_value("verify_deviations")
                                     .value_or(Json(false))
                                     .get<bool>();
  const std::optional<int> deviation_k_cap = reader.optional_int("deviation_k_cap");
  const std::optional<int> interim_k = reader.optional_int("interim_k");
  std::optional<uint64_t> seed;
  if (samples) seed = resolve_seed(args, reader);
  reader.finish();
  pgg::validate(params);
  const pgg::ThresholdProfile profile = pgg::parse_profile_value(profile_value, params.n_agents);
  pgg::check_agent_index(params, agent);

  Json doc;
  doc["command"] = "payoff";
  doc["agent"] = agent;
  doc["profile"] = pgg::profile_to_json(profile);
  if (interim_k) {
    Json interim;
    interim["k"] = *interim_k;
    interim["activate"] = pgg::interim_payoff(params, agent, profile, *interim_k, 1);
    doc["interim"] = interim;
  }
  if (params.has_binary_prior()) {
    doc["exact"] = pgg::exact_payoff_binary(params, agent, profile);
  } else if (!interim_k) {
    pgg::throw_validation("WrongPrior",
                          "ex-ante payoff is undefined under the uniform prior; "
                          "request interim_k instead");
  }
  if (samples) {
    doc["mc"] = pgg::payoff_estimate_to_json(
        pgg::mc_payoff(params, agent, profile, *samples, *seed));
  }
  if (verify_deviations) {
    const int cap = deviation_k_cap.value_or(pgg::k_cap(params, profile, agent));
    doc["verification"] = pgg::deviation_report_to_json(
        pgg::verify_equilibrium_payoff(params, profile, cap));
  }
  write_json(args.out_path, doc);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Threshold equilibria for N-agent global games with Poisson observations"};
  app.require_subcommand(1);

  CommonArgs args;
  std::string out_buffer;
  std::string schedule_buffer;
  uint64_t seed_buffer = 0;

  const auto add_common = [&](CLI::App* cmd, bool needs_config, bool stochastic,
                              bool has_schedule) {
    auto* config = cmd->add_option("--config", args.config_path, "JSON config file");
    if (needs_config) config->required();
    cmd->add_option("--out", out_buffer, "output path (default: stdout)");
    if (stochastic) cmd->add_option("--seed", seed_buffer, "64-bit seed; overrides the config");
    if (has_schedule)
      cmd->add_option("--schedule", schedule_buffer, "sequential|simultaneous");
  };

  CLI::App* solve = app.add_subcommand("solve", "best-response dynamics to a fixed point");
  add_common(solve, true, false, true);
  CLI::App* table1 = app.add_subcommand("table1", "worked-example equilibrium table (CSV)");
  add_common(table1, false, false, false);
  CLI::App* multiplicity =
      app.add_subcommand("multiplicity", "equilibrium histogram from random inits (CSV)");
  add_common(multiplicity, true, true, false);
  CLI::App* conditions =
      app.add_subcommand("conditions", "existence-condition sweep over lambda (CSV)");
  add_common(conditions, true, false, false);
  CLI::App* verify = app.add_subcommand("verify", "numerical invariant suites (JSON)");
  add_common(verify, false, true, false);
  CLI::App* payoff = app.add_subcommand("payoff", "exact/MC payoff evaluation (JSON)");
  add_common(payoff, true, true, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& error) {
    const int code = app.exit(error);
    return code == 0 ? 0 : 1;
  }

  if (app.count_all() > 0) {  // flags seen anywhere; copy into optionals
    for (CLI::App* cmd : {solve, table1, multiplicity, conditions, verify, payoff}) {
      if (cmd->parsed()) {
        if (cmd->count("--out") > 0) args.out_path = out_buffer;
        if (cmd->get_option_no_throw("--seed") != nullptr && cmd->count("--seed") > 0) {
          args.seed = seed_buffer;
        }
        if (cmd->get_option_no_throw("--schedule") != nullptr && cmd->count("--schedule") > 0) {
          args.schedule = schedule_buffer;
        }
      }
    }
  }

  try {
    if (solve->parsed()) return cmd_solve(args);
    if (table1->parsed()) return cmd_table1(args);
    if (multiplicity->parsed()) return cmd_multiplicity(args);
    if (conditions->parsed()) return cmd_conditions(args);
    if (verify->parsed()) return cmd_verify(args);
    if (payoff->parsed()) return cmd_payoff(args);
  } catch (const pgg::Error& error) {
    Json doc;
    doc["error"] = error.name();
    doc["message"] = error.what();
    std::cout << doc.dump(2) << "\n";
    return static_cast<int>(error.kind());
  } catch (const std::exception& error) {
    Json doc;
    doc["error"] = "InternalError";
    doc["message"] = error.what();
    std::cout << doc.dump(2) << "\n";
    return 2;
  }
  return 0;
}
