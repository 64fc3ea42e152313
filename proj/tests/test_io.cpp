#include "tresca/io.hpp"
#include "tresca/verification.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

using namespace tresca;
namespace fs = std::filesystem;

namespace {

std::string config_path(const std::string& name) { return std::string(TRESCA_CONFIG_DIR) + "/" + name; }

nlohmann::json reference_doc() {
  std::ifstream in(config_path("reference.json"));
  return nlohmann::json::parse(in);
}

std::string label_of(const nlohmann::json& doc) {
  try {
    parse_config_json(doc);
  } catch (const ValidationError& e) {
    return e.label();
  }
  return "none";
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("shipped configurations parse") {
  const ProblemConfig ref = parse_config(config_path("reference.json"));
  CHECK(ref.p == 2.0);
  CHECK(ref.schedule == std::vector<int>{1, 10, 100, 1000});
  CHECK(config_hash(ref) == config_hash(builtin_reference_config()));
  CHECK_NOTHROW(parse_config(config_path("stick_slip.json")));
}

TEST_CASE("validation names the violated assumption") {
  nlohmann::json doc = reference_doc();
  doc["p"] = 1.6;
  doc["q"] = 1.0;
  CHECK(label_of(doc) == "(compa2)");

  doc = reference_doc();
  doc["p"] = 2.0;
  doc["q"] = 1.4;
  CHECK(label_of(doc) == "none");

  doc = reference_doc();
  doc["q"] = 1.1;
  CHECK(label_of(doc) == "(compa1)");

  doc = reference_doc();
  doc["viscosity"]["mu1"] = 0.2;
  CHECK(label_of(doc) == "(mlo)");

  doc = reference_doc();
  doc["k"] = "x1 - 0.5";
  CHECK(label_of(doc) == "(eqfk)");

  doc = reference_doc();
  doc["G"] = {"x1 * (1 - x2)", "0"};
  CHECK(label_of(doc) == "(eqG)");

  doc = reference_doc();
  doc["conductivity"]["k0"] = 2.0;
  CHECK(label_of(doc) == "(TEM2bis)");

  doc = reference_doc();
  doc["heat_source"]["sup"] = 0.01;
  CHECK(label_of(doc) == "(Cr)");

  CHECK_THROWS_AS(validate_exponents(2.0, 1.1), ValidationError);
  CHECK_NOTHROW(validate_exponents(4.0, 1.0));
}

TEST_CASE("malformed configurations") {
  CHECK_THROWS_AS(parse_config(config_path("does_not_exist.json")), ConfigError);
  nlohmann::json doc = reference_doc();
  doc["theta_b"] = "sin(";
  CHECK_THROWS_AS(parse_config_json(doc), ConfigError);
  doc = reference_doc();
  doc["domain"]["height"] = "x1 - 0.5";
  CHECK_THROWS_AS(parse_config_json(doc), ConfigError);
  CHECK_THROWS_AS(parse_config_json(nlohmann::json::array()), ConfigError);
}

TEST_CASE("hashing") {
  CHECK(fnv1a_hex("") == "cbf29ce484222325");
  CHECK(fnv1a_hex("a") == "af63dc4c8601ec8c");
  nlohmann::json doc = reference_doc();
  const std::string h = config_hash(parse_config_json(doc));
  doc["seed"] = 2;
  CHECK(config_hash(parse_config_json(doc)) != h);
}

TEST_CASE("number formatting") {
  for (double v : {0.1, 1.0 / 3.0, 6.02214076e23, -2.5e-300, 0.0}) {
    const std::string s = format_double(v);
    CHECK(std::stod(s) == v);
  }
  CHECK(format_double(0.1) == "0.1");
  CHECK(json_number(std::numeric_limits<double>::infinity()) == "inf");
  CHECK(json_number(-std::numeric_limits<double>::infinity()) == "-inf");
  CHECK(json_number(std::nan("")) == "nan");
  CHECK(json_number(1.5) == 1.5);
}

TEST_CASE("solution files") {
  ProblemConfig config = builtin_reference_config();
  config.schedule = {1, 10};
  config.source["schedule"] = config.schedule;
  const CoupledProblem problem(config);
  const CoupledResult result = solve_coupled(problem, ContinuationSchedule::from_config(config));
  const fs::path out = fs::temp_directory_path() / "tresca_io_test";
  fs::remove_all(out);
  write_solution(problem, result, out.string());

  SUBCASE("report round trip") {
    const nlohmann::json back = nlohmann::json::parse(slurp(out / "report.json"));
    CHECK(back == report_json(problem, result));
    CHECK(back["config_hash"] == config_hash(config));
    CHECK(back["seed"] == config.seed);
  }

  SUBCASE("traction table") {
    std::ifstream in(out / "gamma0_traction.csv");
    std::string line;
    std::getline(in, line);
    CHECK(line == "x1,sigma_n,sigma_tau_1,sigma_tau_norm,k,state");
    std::size_t rows = 0;
    while (std::getline(in, line)) ++rows;
    CHECK(rows == problem.disc().friction_points().size());
  }

  SUBCASE("vtk fields") {
    const std::string vtk = slurp(out / "fields.vtk");
    CHECK(vtk.find("VECTORS velocity double") != std::string::npos);
    CHECK(vtk.find("SCALARS pressure double 1") != std::string::npos);
    CHECK(vtk.find("SCALARS temperature double 1") != std::string::npos);
  }
  fs::remove_all(out);
}

TEST_CASE("zero solution output") {
  const CoupledProblem problem(parse_config(config_path("reference.json")));
  const CoupledState zero = zero_coupled_state(problem, 1.0);
  std::ostringstream csv;
  write_traction_csv(problem, zero, csv);
  std::istringstream in(csv.str());
  std::string line;
  std::getline(in, line);
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    CHECK(line.substr(line.rfind(',') + 1) == "stick");
  }
  CHECK(rows == problem.disc().friction_points().size());
}

TEST_CASE("verification suite with no samples is vacuous") {
  const VerificationReport rep = run_verification_suite(3, 0);
  CHECK(rep.passed());
  CHECK(rep.checks.empty());
  CHECK(rep.warnings.size() == 1);
}
