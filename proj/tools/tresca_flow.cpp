#include "tresca/io.hpp"
#include "tresca/mms.hpp"
#include "tresca/verification.hpp"

#include <CLI11.hpp>
#include <omp.h>

#include <cstdlib>
#include <iostream>
#include <sstream>

using namespace tresca;

namespace {

constexpr int kOk = 0;
constexpr int kValidation = 2;
constexpr int kSolver = 3;
constexpr int kVerification = 4;

void apply_thread_cap() {
  if (const char* env = std::getenv("TRESCA_FLOW_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) omp_set_num_threads(n);
  }
}

std::vector<int> parse_schedule(const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stoi(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ConfigError("--schedule: '" + item + "' is not an integer");
    }
  }
  return out;
}

int run_solve(const std::string& config_path, const std::string& out_dir,
              const std::string& schedule_text) {
  ProblemConfig config = parse_config(config_path);
  if (!schedule_text.empty()) {
    config.schedule = parse_schedule(schedule_text);
    config.source["schedule"] = config.schedule;
  }
  const CoupledProblem problem(config);
  ContinuationSchedule schedule = ContinuationSchedule::from_config(config);
  const CoupledResult result = solve_coupled(problem, schedule);
  write_solution(problem, result, out_dir);
  if (!result.report.peclet_ok)
    std::cerr << "warning: mesh Peclet number " << result.report.mesh_peclet
              << " exceeds " << kPecletWarning << "; refine the mesh\n";
  for (const auto& s : result.report.stages)
    std::cout << "m = " << s.m << ": " << s.iterations << " iterations, metric "
              << s.final_metric << ", |theta|_1q " << s.theta_norm_1q << ", |v|_1p "
              << s.velocity_norm << ", stick/slip " << s.stick_points << "/" << s.slip_points
              << '\n';
  std::cout << "wrote " << out_dir << "/{fields.vtk, gamma0_traction.csv, report.json}\n";
  return kOk;
}

int run_verify(std::uint64_t seed, std::size_t samples) {
  const VerificationReport rep = run_verification_suite(seed, samples);
  for (const auto& w : rep.warnings) std::cerr << "warning: " << w << '\n';
  for (const auto& c : rep.checks)
    std::cout << (c.passed ? "PASS " : "FAIL ") << c.name << "  (" << c.detail << ")\n";
  std::cout << rep.to_json().dump(2) << '\n';
  return rep.passed() ? kOk : kVerification;
}

int run_mms_case(const std::string& name, int levels, int base) {
  const MmsResult r = run_mms(name, levels, base);
  for (std::size_t i = 0; i < r.levels.size(); ++i) {
    std::cout << "n = " << r.levels[i].resolution << "  h = " << r.levels[i].h
              << "  error = " << r.levels[i].error;
    if (i > 0) std::cout << "  order = " << r.orders[i - 1];
    std::cout << '\n';
  }
  std::cout << (r.passed ? "PASS" : "FAIL") << " (required order " << r.required_order << ")\n";
  return r.passed ? kOk : kVerification;
}

int run_constants(const std::string& config_path) {
  const ProblemConfig config = parse_config(config_path);
  const Discretization disc(build_mesh(config.domain()), config.quadrature_degree());
  ConstantsOptions opts;
  opts.seed = config.seed + 7;
  const EstimateConstants c = with_data(estimate_constants(disc, config.p, config.q, opts), config);
  const FlowDataNorms n = flow_data_norms(disc, config);
  nlohmann::json out;
  out["constants"] = constants_json(c);
  out["flow_data_norms"] = {{"f", json_number(n.f_norm)},
                            {"G_1p", json_number(n.G_norm)},
                            {"DG_p", json_number(n.DG_norm)},
                            {"psi_zero", json_number(n.psi_zero)}};
  out["c_flow"] = json_number(c_flow_bound(c, config.p, n).t_star);
  const TruncationExponents e = truncation_exponents(config.q);
  out["truncation_exponents"] = {{"zeta", json_number(e.zeta)},
                                 {"q_star", json_number(e.q_star)},
                                 {"rho", json_number(e.rho)},
                                 {"alpha", json_number(e.alpha)}};
  std::cout << out.dump(2) << '\n';
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  apply_thread_cap();
  CLI::App app{"Coupled non-isothermal p-Stokes flow with Tresca friction"};
  app.require_subcommand(1);

  std::string config_path, out_dir, schedule_text;
  auto* solve = app.add_subcommand("solve", "Run the delta continuation and write results");
  solve->add_option("--config", config_path, "JSON problem file")->required();
  solve->add_option("--out", out_dir, "Output directory")->required();
  solve->add_option("--schedule", schedule_text, "Comma-separated m values (delta = 1/m)");

  std::uint64_t seed = 0;
  std::size_t samples = 100000;
  auto* verify = app.add_subcommand("verify", "Run the oracle verification suite");
  verify->add_option("--seed", seed, "Random seed");
  verify->add_option("--samples", samples, "Samples per inequality family");

  std::string mms_case;
  int levels = 4, base = 4;
  auto* mms = app.add_subcommand("mms", "Manufactured-solution convergence study");
  mms->add_option("--case", mms_case, "heat, stokes_p2, plap_p1.5 or plap_p3")
      ->required()
      ->check(CLI::IsMember(mms_cases()));
  mms->add_option("--levels", levels, "Number of meshes")->check(CLI::Range(2, 8));
  mms->add_option("--base", base, "Coarsest resolution")->check(CLI::Range(1, 256));

  auto* constants = app.add_subcommand("constants", "Estimate the functional-inequality constants");
  constants->add_option("--config", config_path, "JSON problem file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kValidation;
  }

  try {
    if (*solve) return run_solve(config_path, out_dir, schedule_text);
    if (*verify) return run_verify(seed, samples);
    if (*mms) return run_mms_case(mms_case, levels, base);
    if (*constants) return run_constants(config_path);
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kValidation;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kValidation;
  } catch (const SolverError& e) {
    std::cerr << "solver error: " << e.what() << '\n';
    return kSolver;
  } catch (const InvariantViolation& e) {
    std::cerr << "invariant violated: " << e.what() << '\n';
    return kSolver;
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kSolver;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return kOk;
}
