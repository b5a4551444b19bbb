// End-to-end tests of the pgg binary: config ingestion, artifact emission,
// exit codes, and byte-level reproducibility.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <catch2/catch_amalgamated.hpp>
#include <json.hpp>

namespace fs = std::filesystem;
using Json = nlohmann::json;

namespace {

struct CliResult {
  int exit_code = -1;
  std::string out;
};

fs::path scratch_dir() {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() /
                 ("pgg_cli_test_" + std::to_string(static_cast<long>(::getpid())));
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

fs::path write_file(const std::string& name, const std::string& content) {
  const fs::path path = scratch_dir() / name;
  std::ofstream out(path, std::ios::binary);
  out << content;
  return path;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

CliResult run_cli(const std::string& arguments) {
  static int counter = 0;
  const fs::path out_path = scratch_dir() / ("stdout_" + std::to_string(counter++) + ".txt");
  const std::string command = std::string(PGG_CLI_PATH) + " " + arguments + " > " +
                              out_path.string() + " 2>/dev/null";
  const int raw = std::system(command.c_str());
  CliResult result;
  result.exit_code = (raw >= 0 && WIFEXITED(raw)) ? WEXITSTATUS(raw) : -1;
  result.out = read_file(out_path);
  return result;
}

std::string uniform_solve_config(int n_agents, double rate) {
  Json doc;
  doc["n_agents"] = n_agents;
  doc["rate"] = rate;
  doc["prior.kind"] = "uniform";
  return doc.dump();
}

}  // namespace

TEST_CASE("solve emits the equilibrium document", "[cli]") {
  const fs::path config = write_file("solve_uniform.json", uniform_solve_config(20, 1.0));
  const CliResult result = run_cli("solve --config " + config.string());
  REQUIRE(result.exit_code == 0);
  const Json doc = Json::parse(result.out);
  REQUIRE(doc["command"] == "solve");
  REQUIRE(doc["converged"] == true);
  REQUIRE(doc["fixed_point"] == true);
  REQUIRE(doc["schedule"] == "sequential");
  REQUIRE(doc["existence"]["overall"] == true);
  REQUIRE(doc["profile"].size() == 20);
  const Json& first = doc["profile"][0];
  for (const Json& entry : doc["profile"]) REQUIRE(entry == first);
  // trace starts at the default all-Finite{0} init
  REQUIRE(doc["trace"][0].size() == 20);
  for (const Json& entry : doc["trace"][0]) REQUIRE(entry == Json(0));
}

TEST_CASE("solve accepts explicit inits and schedules", "[cli]") {
  Json doc = Json::parse(uniform_solve_config(10, 1.0));
  doc["init"] = 25;
  doc["schedule"] = "sequential";
  const fs::path config = write_file("solve_init.json", doc.dump());

  const CliResult sequential = run_cli("solve --config " + config.string());
  REQUIRE(sequential.exit_code == 0);

  const CliResult simultaneous =
      run_cli("solve --config " + config.string() + " --schedule simultaneous");
  REQUIRE(simultaneous.exit_code == 0);
  REQUIRE(Json::parse(simultaneous.out)["schedule"] == "simultaneous");
}

TEST_CASE("solve writes belief-curve CSV on request", "[cli]") {
  Json doc = Json::parse(uniform_solve_config(10, 1.0));
  const fs::path curve_path = scratch_dir() / "curve.csv";
  doc["belief_curve_out"] = curve_path.string();
  doc["belief_curve_k_max"] = 5;
  const fs::path config = write_file("solve_curve.json", doc.dump());
  const fs::path out_path = scratch_dir() / "solve_curve_result.json";

  const CliResult result =
      run_cli("solve --config " + config.string() + " --out " + out_path.string());
  REQUIRE(result.exit_code == 0);
  REQUIRE(Json::parse(read_file(out_path))["command"] == "solve");
  const std::string csv = read_file(curve_path);
  REQUIRE(csv.rfind("k,phi,pi\n", 0) == 0);
  REQUIRE(std::count(csv.begin(), csv.end(), '\n') == 7);  // header + k = 0..5
}

TEST_CASE("invalid configs exit with code 1 and a named error", "[cli]") {
  const fs::path bad_order = write_file("bad_order.json", R"({
    "n_agents": 4, "rate": 1.0, "prior.kind": "binary",
    "prior.theta0": 100.0, "prior.theta1": 50.0, "prior.p0": 0.5})");
  const CliResult order = run_cli("solve --config " + bad_order.string());
  REQUIRE(order.exit_code == 1);
  REQUIRE(Json::parse(order.out)["error"] == "InvalidOrder");

  const fs::path unknown = write_file("unknown_key.json", R"({
    "n_agents": 4, "rate": 1.0, "prior.kind": "uniform", "mystery": 3})");
  const CliResult mystery = run_cli("solve --config " + unknown.string());
  REQUIRE(mystery.exit_code == 1);
  REQUIRE(Json::parse(mystery.out)["error"] == "InvalidConfig");

  const CliResult missing = run_cli("solve --config /nonexistent/path.json");
  REQUIRE(missing.exit_code == 1);
}

TEST_CASE("numerical failures exit with code 2", "[cli]") {
  // theta1 <= N-1 with a tiny rate: opponent activation limits reach theta1,
  // so no finite search bound exists and the dynamics cannot run.
  const fs::path config = write_file("degenerate.json", R"({
    "n_agents": 5, "rate": 1e-6, "prior.kind": "binary",
    "prior.theta0": 1.0, "prior.theta1": 2.0, "prior.p0": 0.5,
    "init": 3})");
  const CliResult result = run_cli("solve --config " + config.string());
  REQUIRE(result.exit_code == 2);
  REQUIRE(Json::parse(result.out)["error"] == "NoFiniteCap");
}

TEST_CASE("table1 output is deterministic with the documented header", "[cli]") {
  const CliResult first = run_cli("table1");
  REQUIRE(first.exit_code == 0);
  REQUIRE(first.out.rfind("p0,tau_star\n", 0) == 0);
  REQUIRE(std::count(first.out.begin(), first.out.end(), '\n') == 6);

  const CliResult second = run_cli("table1");
  REQUIRE(second.out == first.out);

  const fs::path out_path = scratch_dir() / "table1.csv";
  const CliResult to_file = run_cli("table1 --out " + out_path.string());
  REQUIRE(to_file.exit_code == 0);
  REQUIRE(read_file(out_path) == first.out);
}

TEST_CASE("multiplicity is byte-reproducible from its seed", "[cli]") {
  Json doc;
  doc["rate"] = 1.0;
  doc["n_agents_list"] = {10};
  doc["runs"] = 5;
  doc["init_geometric_p"] = 0.05;
  doc["seed"] = 404;
  const fs::path config = write_file("multiplicity.json", doc.dump());

  const CliResult first = run_cli("multiplicity --config " + config.string());
  REQUIRE(first.exit_code == 0);
  REQUIRE(first.out.rfind("n_agents,tau_star,frequency\n", 0) == 0);
  const CliResult second = run_cli("multiplicity --config " + config.string());
  REQUIRE(second.out == first.out);

  // --seed overrides the config seed
  const CliResult overridden =
      run_cli("multiplicity --config " + config.string() + " --seed 405");
  Json with_other_seed = doc;
  with_other_seed["seed"] = 405;
  const fs::path config2 = write_file("multiplicity2.json", with_other_seed.dump());
  const CliResult direct = run_cli("multiplicity --config " + config2.string());
  REQUIRE(overridden.out == direct.out);

  // frequencies sum to the run count
  int total = 0;
  std::istringstream lines(first.out);
  std::string line;
  std::getline(lines, line);
  while (std::getline(lines, line)) {
    const size_t last_comma = line.rfind(',');
    total += std::stoi(line.substr(last_comma + 1));
  }
  REQUIRE(total == 5);
}

TEST_CASE("multiplicity without a seed is rejected", "[cli]") {
  Json doc;
  doc["rate"] = 1.0;
  doc["n_agents_list"] = {10};
  doc["runs"] = 2;
  doc["init_geometric_p"] = 0.05;
  const fs::path config = write_file("multiplicity_noseed.json", doc.dump());
  const CliResult result = run_cli("multiplicity --config " + config.string());
  REQUIRE(result.exit_code == 1);
  REQUIRE(Json::parse(result.out)["error"] == "InvalidConfig");
}

TEST_CASE("conditions sweeps emit both variants", "[cli]") {
  Json binary;
  binary["n_agents"] = 100;
  binary["prior.kind"] = "binary";
  binary["prior.theta0"] = 50.0;
  binary["prior.theta1"] = 100.0;
  binary["p0_list"] = {0.1, 0.5};
  binary["lambda_min"] = 1e-6;
  binary["lambda_max"] = 1e-2;
  binary["lambda_points"] = 5;
  const fs::path binary_config = write_file("conditions_binary.json", binary.dump());
  const CliResult binary_result = run_cli("conditions --config " + binary_config.string());
  REQUIRE(binary_result.exit_code == 0);
  REQUIRE(binary_result.out.rfind("lambda,p0,g,theta1_margin,crossing_exists\n", 0) == 0);
  REQUIRE(std::count(binary_result.out.begin(), binary_result.out.end(), '\n') == 11);

  // g at the smallest lambda approaches N-1-E[Theta]
  std::istringstream lines(binary_result.out);
  std::string header, row;
  std::getline(lines, header);
  std::getline(lines, row);  // lambda=1e-6, p0=0.1: E[Theta] = 95
  std::istringstream cells(row);
  std::string lambda_s, p0_s, g_s;
  std::getline(cells, lambda_s, ',');
  std::getline(cells, p0_s, ',');
  std::getline(cells, g_s, ',');
  REQUIRE(std::stod(g_s) == Catch::Approx(99.0 - 95.0).margin(0.05));

  Json uniform;
  uniform["n_agents"] = 100;
  uniform["prior.kind"] = "uniform";
  uniform["lambda_min"] = 0.001;
  uniform["lambda_max"] = 10.0;
  uniform["lambda_points"] = 4;
  const fs::path uniform_config = write_file("conditions_uniform.json", uniform.dump());
  const CliResult uniform_result = run_cli("conditions --config " + uniform_config.string());
  REQUIRE(uniform_result.exit_code == 0);
  REQUIRE(uniform_result.out.rfind("lambda,rate_margin,condition_rate\n", 0) == 0);
  REQUIRE(std::count(uniform_result.out.begin(), uniform_result.out.end(), '\n') == 5);
}

TEST_CASE("verify reports families and honors tolerance overrides", "[cli]") {
  Json quick;
  quick["seed"] = 11;
  quick["draws"] = 40;
  quick["mc_samples"] = 10000;
  quick["payoff_instances"] = 8;
  const fs::path config = write_file("verify_quick.json", quick.dump());
  const CliResult ok = run_cli("verify --config " + config.string());
  REQUIRE(ok.exit_code == 0);
  const Json doc = Json::parse(ok.out);
  REQUIRE(doc["command"] == "verify");
  REQUIRE(doc["overall"] == true);
  REQUIRE(doc["families"].size() == 11);

  Json broken = quick;
  broken["derivative_rel_tol"] = 1e-20;
  broken["families"] = {"poisson_cdf_derivative"};
  const fs::path broken_config = write_file("verify_broken.json", broken.dump());
  const CliResult failed = run_cli("verify --config " + broken_config.string());
  REQUIRE(failed.exit_code == 2);
  const Json failed_doc = Json::parse(failed.out);
  REQUIRE(failed_doc["overall"] == false);
  REQUIRE(failed_doc["families"][0]["failures"] > 0);
}

TEST_CASE("verify without a config still needs a seed", "[cli]") {
  const CliResult no_seed = run_cli("verify");
  REQUIRE(no_seed.exit_code == 1);
  Json quick;
  quick["draws"] = 10;
  quick["mc_samples"] = 5000;
  quick["payoff_instances"] = 4;
  const fs::path config = write_file("verify_seedflag.json", quick.dump());
  const CliResult with_flag = run_cli("verify --config " + config.string() + " --seed 3");
  REQUIRE(with_flag.exit_code == 0);
}

TEST_CASE("payoff evaluates exact, MC, and deviation checks", "[cli]") {
  Json doc;
  doc["n_agents"] = 2;
  doc["rate"] = 1.0;
  doc["prior.kind"] = "binary";
  doc["prior.theta0"] = 1.0;
  doc["prior.theta1"] = 2.0;
  doc["prior.p0"] = 0.5;
  doc["profile"] = {0, 0};
  doc["agent"] = 0;
  doc["samples"] = 50000;
  doc["seed"] = 77;
  const fs::path config = write_file("payoff_binary.json", doc.dump());
  const CliResult result = run_cli("payoff --config " + config.string());
  REQUIRE(result.exit_code == 0);
  const Json parsed = Json::parse(result.out);
  const double exact = parsed["exact"].get<double>();
  REQUIRE(exact == Catch::Approx(-0.24244).margin(1e-4));
  const double mc_mean = parsed["mc"]["mean"].get<double>();
  const double half_width = parsed["mc"]["half_width_95"].get<double>();
  REQUIRE(std::abs(mc_mean - exact) <= half_width);

  // the (never, never) profile is an equilibrium; deviations must not help
  Json verify_doc = doc;
  verify_doc.erase("samples");
  verify_doc.erase("seed");
  verify_doc["profile"] = {"never", "never"};
  verify_doc["verify_deviations"] = true;
  verify_doc["deviation_k_cap"] = 25;
  const fs::path verify_config = write_file("payoff_verify.json", verify_doc.dump());
  const CliResult verify_result = run_cli("payoff --config " + verify_config.string());
  REQUIRE(verify_result.exit_code == 0);
  const Json verify_parsed = Json::parse(verify_result.out);
  REQUIRE(verify_parsed["verification"]["pass"] == true);
  REQUIRE(verify_parsed["verification"]["agents"].size() == 2);
}

TEST_CASE("payoff under the uniform prior is interim-only", "[cli]") {
  Json doc;
  doc["n_agents"] = 2;
  doc["rate"] = 1.0;
  doc["prior.kind"] = "uniform";
  doc["profile"] = {0, 0};
  const fs::path config = write_file("payoff_uniform.json", doc.dump());
  const CliResult rejected = run_cli("payoff --config " + config.string());
  REQUIRE(rejected.exit_code == 1);
  REQUIRE(Json::parse(rejected.out)["error"] == "WrongPrior");

  Json interim = doc;
  interim["interim_k"] = 0;
  const fs::path interim_config = write_file("payoff_interim.json", interim.dump());
  const CliResult accepted = run_cli("payoff --config " + interim_config.string());
  REQUIRE(accepted.exit_code == 0);
  // uniform, N=2, rate 1, opponent Finite{0}, k=0: pi - phi = 0.5 - 1
  REQUIRE(Json::parse(accepted.out)["interim"]["activate"].get<double>() ==
          Catch::Approx(-0.5).margin(1e-12));
}
