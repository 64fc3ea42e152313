#pragma once

#include "tresca/assembly.hpp"
#include "tresca/config.hpp"

#include <optional>
#include <string>
#include <vector>

namespace tresca {

/// Data of the frozen-argument flow problem.
struct FlowData {
  ViscosityModel model = ViscosityModel::constant(1.0);
  double p = 2.0;
  VectorFn f;  ///< body force; empty means zero
  VectorFn G;  ///< divergence-free extension of the boundary data
  VectorFn s;  ///< wall velocity on Gamma0
  ScalarFn k;  ///< friction threshold on Gamma0
  SolverSettings settings;
};

FlowData flow_data(const ProblemConfig& config);

/// Everything that does not change between flow solves on one mesh.
class FlowProblem {
 public:
  FlowProblem(const Discretization& disc, FlowData data);

  const Discretization& disc() const { return *disc_; }
  const FlowData& data() const { return data_; }
  const FlowAssembler& assembler() const { return assembler_; }
  const Eigen::VectorXd& G() const { return G_; }        ///< full P2 interpolant
  const Eigen::VectorXd& load() const { return load_; }  ///< int f . phi, free
  const std::vector<double>& k() const { return k_; }    ///< per Gamma0 point
  const std::vector<Vec>& s() const { return s_; }       ///< per Gamma0 point
  const SparseMatrix& B() const { return B_; }
  const Eigen::VectorXd& mass() const { return mass_; }
  const Eigen::VectorXd& divergence_of_G() const { return div_G_; }
  double rho0() const { return rho0_; }
  double velocity_scale() const { return velocity_scale_; }
  /// |u_tau - s| at or below this counts as stick: 1e-6 max(1, max |s|).
  double stick_tolerance() const { return stick_tolerance_; }
  /// Tangential velocity u_tau - s at every Gamma0 point.
  std::vector<Vec> slip(const Eigen::VectorXd& v) const;
  /// Full P2 vector of v + G.
  Eigen::VectorXd total_velocity(const Eigen::VectorXd& v) const { return v + G_; }

  /// p = 2 assembler used for the initial guess when p != 2.
  const FlowAssembler& linear_assembler() const { return linear_ ? *linear_ : assembler_; }

 private:
  const Discretization* disc_;
  FlowData data_;
  FlowAssembler assembler_;
  std::optional<FlowAssembler> linear_;
  Eigen::VectorXd G_, load_, mass_, div_G_;
  std::vector<double> k_;
  std::vector<Vec> s_;
  SparseMatrix B_;
  double rho0_ = 1.0;
  double velocity_scale_ = 1.0;
  double stick_tolerance_ = 1e-6;
};

struct FlowDiagnostics {
  int newton_iterations = 0;  ///< summed over all multiplier updates
  int uzawa_iterations = 0;
  double residual = 0.0;           ///< final inner residual norm
  double residual_scale = 0.0;     ///< the load norm it is compared with
  double multiplier_change = 0.0;  ///< last max |lambda_{n+1} - lambda_n|
  double rho = 0.0;
  double divergence_residual = 0.0;
  double velocity_norm = 0.0;  ///< ||v||_{1.p}
  std::vector<double> uzawa_history;
};

/// Discrete velocity v (full P2, constrained entries zero), pressure (P1,
/// zero mean) and the friction multiplier lambda ~ sigma_tau at the Gamma0
/// points (size-d vectors with last entry 0).
struct FlowState {
  Eigen::VectorXd velocity;
  Eigen::VectorXd pressure;
  std::vector<Vec> lambda;
  double mean_multiplier = 0.0;
  FlowDiagnostics diag;
};

FlowState zero_flow_state(const FlowProblem& problem);

/// Tresca flow variational inequality with mu's first two arguments frozen
/// at (theta_frozen, u_frozen). Augmented-Lagrangian Uzawa on lambda around
/// a damped semismooth Newton solve of the velocity-pressure system.
FlowState solve_flow_vi(const FlowProblem& problem, const Eigen::VectorXd& theta_frozen,
                        const Eigen::VectorXd& u_frozen, const FlowState* warm_start = nullptr,
                        Execution exec = Execution::parallel);

/// Euclidean projection onto the closed ball of radius k.
Vec uzawa_project(const Vec& lambda_trial, double k);

/// Least-squares pressure from the momentum residual r of a converged state:
/// B B^T pi = B r with zero mean.
Eigen::VectorXd recover_pressure(const FlowProblem& problem, const FlowState& state,
                                 const Eigen::VectorXd& theta_frozen,
                                 const Eigen::VectorXd& u_frozen,
                                 Execution exec = Execution::parallel);

/// Momentum residual a(u; phi) - (pi, div phi) - (f, phi) - sum w lambda . phi_tau.
Eigen::VectorXd momentum_residual(const FlowProblem& problem, const FlowState& state,
                                  const Eigen::VectorXd& theta_frozen,
                                  const Eigen::VectorXd& u_frozen,
                                  Execution exec = Execution::parallel);

struct Traction {
  double sigma_n = 0.0;
  Vec sigma_tau;
};

/// sigma_n = n . sigma n, sigma_tau = sigma n - sigma_n n. Throws DomainError
/// for a non-unit normal.
Traction compute_traction(const SymTensor& sigma, const Vec& n);

/// Cauchy stress F(theta, u, D(u)) - pi I at a Gamma0 point, evaluated in the
/// cell owning its facet.
SymTensor gamma0_stress(const FlowProblem& problem, const FlowState& state,
                        const Eigen::VectorXd& theta, std::size_t point);

struct ComplementarityReport {
  std::size_t points = 0;
  std::size_t stick = 0;
  std::size_t slip = 0;
  double max_excess = 0.0;       ///< max(|lambda| - k)
  double max_stick_slip = 0.0;   ///< max |u_tau - s| over stick points
  double max_angle = 0.0;        ///< max angle between lambda and -(u_tau - s) at slip points
  double max_k_gap = 0.0;        ///< max ||lambda| - k| / max(k, 1e-300) at slip points
  double tol_stick = 0.0;
  std::vector<char> is_stick;    ///< per point, by |u_tau - s| <= tol_stick
  bool passed = true;
  std::string failure;
};

ComplementarityReport check_complementarity(const FlowProblem& problem, const FlowState& state);

}  // namespace tresca
