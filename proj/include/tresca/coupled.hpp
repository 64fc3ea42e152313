#pragma once

#include "tresca/constants.hpp"
#include "tresca/flow_solver.hpp"
#include "tresca/heat_solver.hpp"

#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace tresca {

/// delta_m = 1/m for increasing m.
struct ContinuationSchedule {
  std::vector<int> m;
  double tol_fp = 1e-8;
  int max_fp = 60;
  int min_fp = 2;

  static ContinuationSchedule from_config(const ProblemConfig& config);
  /// Throws ConfigError unless m is strictly increasing and positive.
  void check() const;
};

/// Mesh, spaces and the two frozen-argument subproblems of one configuration.
class CoupledProblem {
 public:
  explicit CoupledProblem(ProblemConfig config);

  const ProblemConfig& config() const { return config_; }
  const Discretization& disc() const { return *disc_; }
  const FlowProblem& flow() const { return *flow_; }
  const HeatData& heat() const { return heat_; }

 private:
  ProblemConfig config_;
  std::unique_ptr<Discretization> disc_;
  std::unique_ptr<FlowProblem> flow_;
  HeatData heat_;
};

struct CoupledState {
  FlowState flow;
  HeatState heat;
  int iteration = 0;
  double delta = 1.0;
  bool flow_solved = false;  ///< false until the first flow solve (no warm start yet)
  std::vector<double> metrics;
};

CoupledState zero_coupled_state(const CoupledProblem& problem, double delta);

/// What one application of the fixed-point map did besides the new state.
struct StepRecord {
  double metric = 0.0;
  RegularizationReport regularization;
  int newton_iterations = 0;
  int uzawa_iterations = 0;
};

/// (theta_k, v_k) -> (theta_{k+1}, v_{k+1}): flow with mu frozen at
/// (theta_k, u_k), then heat with velocity u_{k+1} and sources frozen at
/// theta_k. The state's delta is used for the regularization.
CoupledState fixed_point_step(const CoupledProblem& problem, const CoupledState& state,
                              Execution exec = Execution::parallel, StepRecord* record = nullptr);

/// ||theta_next - theta_prev||_{1.q} + ||v_next - v_prev||_{1.p}.
double convergence_metric(const Discretization& disc, const CoupledState& prev,
                          const CoupledState& next, double p, double q);

struct StageReport {
  int m = 1;
  double delta = 1.0;
  int iterations = 0;
  std::vector<double> metrics;
  double first_metric = 0.0;
  double final_metric = 0.0;
  double reduction = 0.0;  ///< first / final, infinite when final is 0
  double tolerance = 0.0;  ///< tol_fp * scale
  double theta_norm_1q = 0.0;
  double theta_norm_12 = 0.0;
  double velocity_norm = 0.0;
  int regularization_checks = 0;
  double max_g_inf = 0.0;
  double r_delta = 0.0;
  bool r_delta_ok = true;
  bool complementarity_ok = true;
  std::size_t stick_points = 0;
  std::size_t slip_points = 0;
  int newton_iterations = 0;
  int uzawa_iterations = 0;
};

/// Mesh Peclet number above which the unstabilized convection is flagged.
inline constexpr double kPecletWarning = 10.0;

struct CoupledReport {
  std::string init_hash;
  std::vector<StageReport> stages;
  EstimateConstants constants;
  FlowDataNorms flow_norms;
  double flow_bound = 0.0;
  bool flow_bound_ok = true;
  double heat_energy = 0.0;
  double heat_bound = 1.0;
  bool heat_bound_ok = true;
  double stage_theta_ratio = 1.0;  ///< max / min of ||theta||_{1.q} over stages
  bool warm_start_guard = true;    ///< no first metric grew by more than 10x
  double flow_self_consistency = 0.0;  ///< live-argument momentum residual, relative
  double heat_self_consistency = 0.0;  ///< live-argument heat residual, relative
  double pressure_recovery_gap = 0.0;  ///< ||pi_alm - pi_recovered|| / max(1, ||pi||)
  double divergence_residual = 0.0;
  double mesh_peclet = 0.0;  ///< max nodal |u| * h_max / (2 k0) over stages
  bool peclet_ok = true;     ///< mesh_peclet <= kPecletWarning
};

struct CoupledResult {
  CoupledState state;
  CoupledReport report;
};

/// Called after every fixed-point step.
using StepObserver = std::function<void(const CoupledState&, const StepRecord&)>;

/// Continuation over the schedule with Picard iterations at each delta,
/// warm-starting every stage from the previous one. Throws SolverError with
/// the metric history when a stage does not converge.
CoupledResult solve_coupled(const CoupledProblem& problem, const ContinuationSchedule& schedule,
                            Execution exec = Execution::parallel,
                            const StepObserver& observer = {});

}  // namespace tresca
