#pragma once

#include "tresca/coupled.hpp"

#include <json.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace tresca {

struct JacobianCheck {
  int states = 0;
  double max_relative_error = 0.0;  ///< over states and directions
  bool passed = false;
};

/// Flow Jacobian against central differences of the residual along random
/// directions, at random states (velocity, frozen temperature).
JacobianCheck check_flow_jacobian(const Discretization& disc, const ViscosityModel& model, double p,
                                  int states, std::uint64_t seed, double tol = 1e-6);

struct SkewCheck {
  int samples = 0;
  double max_relative = 0.0;  ///< |w^T C w| / (|w|^T |C| |w|)
  bool passed = false;
};

/// The convection block C(u) has a vanishing quadratic form for any u.
SkewCheck check_heat_skew(const Discretization& disc, int samples, std::uint64_t seed,
                          double tol = 1e-14);

struct DualityCheck {
  int points = 0;
  int mismatches = 0;
  bool curve_decreasing = true;
  bool passed = false;
};

/// q in valid_q_range(p) <=> min_p_for_q(q) admits p, on a p grid over
/// (1.5, 6] crossed with a q grid over [1, 1.5) that includes q = 1.
DualityCheck check_exponent_duality(int p_points = 200);

struct DecoupledOracle {
  double first_metric = 0.0;
  double second_metric = 0.0;
  double tolerance = 0.0;  ///< 10 tol_fp * scale
  double direct_gap = 0.0; ///< step one against separate direct subproblem solves
  bool passed = false;
};

/// Makes mu and r independent of the state (constant mu = mu1, r = r0) and
/// applies the fixed-point map twice from zero.
DecoupledOracle decoupled_oracle(const ProblemConfig& config, Execution exec = Execution::parallel);

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct VerificationReport {
  std::uint64_t seed = 0;
  std::size_t samples = 0;
  std::vector<CheckResult> checks;
  std::vector<std::string> warnings;
  bool passed() const;
  nlohmann::json to_json() const;
};

/// Built-in reference configuration used by the suite (d = 2, p = 2).
ProblemConfig builtin_reference_config();

/// All oracle checks in a fixed order. samples = 0 skips everything with a
/// warning (vacuous pass).
VerificationReport run_verification_suite(std::uint64_t seed, std::size_t samples,
                                          Execution exec = Execution::parallel);

}  // namespace tresca
