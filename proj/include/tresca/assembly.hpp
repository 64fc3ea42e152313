#pragma once

#include "tresca/constitutive.hpp"
#include "tresca/fe.hpp"

#include <vector>

namespace tresca {

/// Fixed compressed sparsity pattern plus, for every cell, the value slot of
/// each local (row, col) pair. Scattering is serial and runs in cell order,
/// so the summation order never depends on how the local blocks were made.
class ScatterPlan {
 public:
  ScatterPlan() = default;
  /// Negative entries in the dof lists are skipped (constrained DOFs).
  ScatterPlan(int rows, int cols, const std::vector<std::vector<int>>& row_dofs,
              const std::vector<std::vector<int>>& col_dofs);

  SparseMatrix zero_matrix() const { return pattern_; }
  void add(SparseMatrix& target, std::size_t cell, const Eigen::MatrixXd& local) const;
  void add_vector(Eigen::VectorXd& target, std::size_t cell, const Eigen::VectorXd& local) const;

 private:
  SparseMatrix pattern_;
  std::vector<std::vector<int>> rows_;
  std::vector<std::vector<int>> slots_;  // row-major local -> value index or -1
};

/// Free velocity DOFs of each cell, local order (a, i) -> a * dim + i.
std::vector<std::vector<int>> velocity_cell_dofs(const Discretization& disc);
std::vector<std::vector<int>> temperature_cell_dofs(const Discretization& disc);
std::vector<std::vector<int>> pressure_cell_dofs(const Discretization& disc);

struct FlowOperator {
  Eigen::VectorXd residual;  ///< free velocity DOFs
  SparseMatrix jacobian;     ///< free x free; empty when not requested
};

/// Frozen-argument flow form
///   R_i = int 2 mu(theta, u_frozen, s) s^{p-2} D(u) : D(phi_i) - int f . phi_i,
/// u = v + G, s = sqrt(|D(u)|^2 + eps^2), and its exact Jacobian in v.
class FlowAssembler {
 public:
  FlowAssembler(const Discretization& disc, const ViscosityModel& model, double p, double eps_reg);

  const Discretization& disc() const { return *disc_; }
  const ViscosityModel& model() const { return model_; }
  double p() const { return p_; }
  double eps_reg() const { return eps_reg_; }

  /// theta_frozen: P1 vertex values; u_frozen, u: full P2 coefficients;
  /// load: free vector of int f . phi (may be empty for no force).
  FlowOperator evaluate(const Eigen::VectorXd& theta_frozen, const Eigen::VectorXd& u_frozen,
                        const Eigen::VectorXd& u, const Eigen::VectorXd& load, Execution exec,
                        bool with_jacobian = true) const;

 private:
  const Discretization* disc_;
  ViscosityModel model_;
  double p_;
  double eps_reg_;
  std::vector<std::vector<int>> dofs_;
  ScatterPlan plan_;
};

/// int f . phi_i over the free velocity DOFs.
Eigen::VectorXd assemble_velocity_load(const Discretization& disc, const VectorFn& f);

/// B_{j,i} = int div(phi_i) psi_j, rows = P1 vertices, cols = free velocity.
SparseMatrix divergence_matrix(const Discretization& disc, Execution exec = Execution::parallel);
/// int div(u) psi_j for a full velocity vector u.
Eigen::VectorXd assemble_divergence(const Discretization& disc, const Eigen::VectorXd& u);

/// sum over Gamma0 points of w lambda . phi_tau, on the free velocity DOFs.
/// lambda has one tangential vector (last entry 0) per friction point.
/// Throws InvariantViolation when |lambda| > k at some point.
Eigen::VectorXd assemble_friction(const Discretization& disc, const std::vector<Vec>& lambda,
                                  const std::vector<double>& k);

/// Bounded heat source r(theta).
struct HeatSource {
  enum class Kind { constant, saturating };
  Kind kind = Kind::constant;
  double r0 = 0.0;
  double r1 = 0.0;
  double scale = 1.0;
  /// r0 (constant) or r0 + r1 tanh(theta / scale) (saturating).
  double operator()(double theta) const;
  double sup() const;
  bool independent_of_theta() const { return kind == Kind::constant || r1 == 0.0; }
};

struct HeatOperator {
  SparseMatrix matrix;   ///< free x free
  Eigen::VectorXd load;  ///< free
};

/// Heat forms on the free temperature DOFs:
/// matrix = (K grad theta, grad w) + 1/2 [(u . grad theta, w) - (u . grad w, theta)].
class HeatAssembler {
 public:
  HeatAssembler(const Discretization& disc, const Mat& K);

  const Discretization& disc() const { return *disc_; }

  SparseMatrix diffusion(Execution exec) const;
  SparseMatrix convection(const Eigen::VectorXd& u, Execution exec) const;
  SparseMatrix matrix(const Eigen::VectorXd& u, Execution exec) const;

 private:
  SparseMatrix assemble(const Eigen::VectorXd* u, bool with_diffusion, Execution exec) const;
  const Discretization* disc_;
  Mat K_;
  std::vector<std::vector<int>> dofs_;
  ScatterPlan plan_;
};

/// The three load contributions of the linearized heat problem.
struct HeatLoad {
  Eigen::VectorXd dissipation;  ///< int g_delta(theta_prev, u) w
  Eigen::VectorXd source;       ///< int r(theta_prev) w
  Eigen::VectorXd boundary;     ///< int_{Gamma0} theta_b_delta w
  Eigen::VectorXd total() const { return dissipation + source + boundary; }
};

/// u is the full P2 vector of v + G; the dissipation uses the exact strain.
HeatLoad assemble_heat_load(const Discretization& disc, const ViscosityModel& model, double p,
                            double delta, const Eigen::VectorXd& theta_prev,
                            const Eigen::VectorXd& u, const HeatSource& r,
                            const ScalarFn& theta_b, Execution exec = Execution::parallel);

HeatOperator assemble_heat(const HeatAssembler& heat, const ViscosityModel& model, double p,
                           double delta, const Eigen::VectorXd& theta_prev,
                           const Eigen::VectorXd& u, const HeatSource& r,
                           const ScalarFn& theta_b, Execution exec = Execution::parallel);

}  // namespace tresca
