#pragma once

#include "tresca/assembly.hpp"
#include "tresca/config.hpp"
#include "tresca/exponents.hpp"

#include <Eigen/SparseLU>

#include <memory>
#include <string>
#include <vector>

namespace tresca {

struct HeatData {
  ViscosityModel model = ViscosityModel::constant(1.0);
  double p = 2.0;
  double q = 1.25;
  Mat K;
  double k0 = 1.0;
  HeatSource r;
  ScalarFn theta_b;  ///< empty means zero flux
  SolverSettings settings;
};

HeatData heat_data(const ProblemConfig& config);

/// Temperature (P1 vertex values, zero on Gamma1 and lateral vertices) for
/// one delta, with the load pieces it was solved with.
struct HeatState {
  Eigen::VectorXd theta;
  double delta = 1.0;
  double norm_12 = 0.0;  ///< ||theta||_{1.2}
  double norm_1q = 0.0;  ///< ||theta||_{1.q}
  double linear_residual = 0.0;  ///< relative, after refinement
  HeatLoad load;
};

HeatState zero_heat_state(const Discretization& disc, double delta);

/// Linearized heat problem at a fixed convecting velocity. The matrix does
/// not depend on delta, so it is factored once in `set_velocity` and reused.
/// A new solver starts with zero velocity.
class HeatSolver {
 public:
  HeatSolver(const Discretization& disc, HeatData data);

  const Discretization& disc() const { return *disc_; }
  const HeatData& data() const { return data_; }
  const HeatAssembler& assembler() const { return assembler_; }

  /// u: full P2 vector of v + G.
  void set_velocity(const Eigen::VectorXd& u, Execution exec = Execution::parallel);
  const Eigen::VectorXd& velocity() const { return u_; }
  const SparseMatrix& matrix() const { return matrix_; }

  HeatState solve(const Eigen::VectorXd& theta_prev, double delta,
                  Execution exec = Execution::parallel) const;
  /// Solves matrix * x = load on the free DOFs.
  Eigen::VectorXd solve_free(const Eigen::VectorXd& load, double* residual = nullptr) const;

 private:
  const Discretization* disc_;
  HeatData data_;
  HeatAssembler assembler_;
  Eigen::VectorXd u_;
  SparseMatrix matrix_;
  std::shared_ptr<Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>>> lu_;
};

/// One-shot convenience: assemble, factor and solve.
HeatState solve_heat_linear(const Discretization& disc, const HeatData& data,
                            const Eigen::VectorXd& u, const Eigen::VectorXd& theta_prev,
                            double delta, Execution exec = Execution::parallel);

struct RegularizationReport {
  double delta = 1.0;
  double g_inf = 0.0;
  double g_l1 = 0.0;
  double bound_inf = 0.0;  ///< 1 / delta
  double bound_l1 = 0.0;   ///< 2 mu1 ||D(u)||_p^p
  bool passed = true;
};

/// Quadrature-level checks 0 <= g_delta <= 1/delta and
/// ||g_delta||_1 <= 2 mu1 ||D(u)||_p^p (relative slack 1e-10). Throws
/// InvariantViolation naming the offending point when either fails.
RegularizationReport verify_regularization_bounds(const Discretization& disc, const HeatData& data,
                                                  const Eigen::VectorXd& theta_prev,
                                                  const Eigen::VectorXd& u, double delta);

/// int_{Gamma0} |fn| by a degree-4 facet rule.
double gamma0_l1(const Discretization& disc, const ScalarFn& fn);

/// 2 mu1 ||D(u)||_p^p + |Omega| sup|r| + ||theta_b||_{L1(Gamma0)}.
double heat_energy_term(const Discretization& disc, const HeatData& data, const Eigen::VectorXd& u);

/// int |grad theta|^2 / (1 + |theta|)^{zeta + 1}.
double truncation_energy(const Discretization& disc, const Eigen::VectorXd& theta, double zeta);

struct UniformBoundReport {
  std::vector<double> deltas;
  std::vector<double> norms_1q;
  std::vector<double> norms_12;
  std::vector<double> r_delta;           ///< per-delta W^{1,2} bound
  std::vector<double> truncation_energy; ///< with the default zeta
  double ratio = 1.0;                    ///< max / min of norms_1q
  double energy_term = 0.0;
  double heat_bound = 1.0;
  bool ratio_ok = true;
  bool bound_ok = true;
  bool r_delta_ok = true;
  bool passed = true;
};

/// Heat solves at fixed velocity for every delta (spanning >= 3 decades).
UniformBoundReport uniform_w1q_check(const HeatSolver& solver, const Eigen::VectorXd& theta_prev,
                                     const std::vector<double>& deltas,
                                     const EstimateConstants& constants,
                                     Execution exec = Execution::parallel);

}  // namespace tresca
