#pragma once

// Independent reference solutions shared by the unit tests and the
// acceptance runner.

#include "tresca/constants.hpp"
#include "tresca/flow_solver.hpp"

#include <Eigen/SparseLU>

#include <vector>

namespace tresca::oracle {

struct StokesSolution {
  Eigen::VectorXd velocity;  ///< full P2 vector of v (G excluded)
  Eigen::VectorXd pressure;  ///< zero mean
};

/// Linear Stokes with u_tau = s imposed at every Gamma0 node (pure stick),
/// for p = 2 and constant viscosity. The tangential Gamma0 DOFs are
/// eliminated and the remaining saddle-point system is solved directly.
inline StokesSolution stick_stokes(const FlowProblem& problem) {
  const Discretization& disc = problem.disc();
  const int d = disc.dim();
  const double mu = problem.data().model.mu0();
  const SparseMatrix A = 2.0 * mu * velocity_forms(disc).strain;
  const int n = disc.num_velocity_free();

  Eigen::VectorXd fixed = Eigen::VectorXd::Zero(n);
  std::vector<char> is_fixed(n, 0);
  const auto& pts = disc.friction_points();
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (int j = 0; j < d - 1; ++j) {
      const int idx = disc.velocity_free()[pts[i].node * d + j];
      if (idx < 0) continue;
      is_fixed[idx] = 1;
      fixed(idx) = problem.s()[i](j) - problem.G()(pts[i].node * d + j);
    }
  std::vector<int> unknown(n, -1);
  int nu = 0;
  for (int i = 0; i < n; ++i)
    if (!is_fixed[i]) unknown[i] = nu++;

  // residual of the extension alone: A(G) - load
  const Eigen::VectorXd zeros_t = Eigen::VectorXd::Zero(disc.num_vertices());
  const Eigen::VectorXd zeros_u = Eigen::VectorXd::Zero(disc.velocity_size());
  const Eigen::VectorXd r0 =
      problem.assembler().evaluate(zeros_t, zeros_u, problem.G(), problem.load(), Execution::serial, false)
          .residual;

  const SparseMatrix& B = problem.B();
  const Eigen::VectorXd& m = problem.mass();
  const int np = static_cast<int>(B.rows());
  const int size = nu + np + 1;
  std::vector<Eigen::Triplet<double>> trip;
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(size);
  for (int i = 0; i < n; ++i)
    if (unknown[i] >= 0) rhs(unknown[i]) = -r0(i);
  for (int k = 0; k < A.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(A, k); it; ++it) {
      const int r = static_cast<int>(it.row()), c = static_cast<int>(it.col());
      if (unknown[r] < 0) continue;
      if (unknown[c] >= 0)
        trip.emplace_back(unknown[r], unknown[c], it.value());
      else
        rhs(unknown[r]) -= it.value() * fixed(c);
    }
  rhs.segment(nu, np) = -problem.divergence_of_G();
  for (int k = 0; k < B.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(B, k); it; ++it) {
      const int r = static_cast<int>(it.row()), c = static_cast<int>(it.col());
      if (unknown[c] >= 0) {
        trip.emplace_back(nu + r, unknown[c], it.value());
        trip.emplace_back(unknown[c], nu + r, -it.value());
      } else {
        rhs(nu + r) -= it.value() * fixed(c);
      }
    }
  for (int j = 0; j < np; ++j) {
    trip.emplace_back(nu + j, nu + np, m(j));
    trip.emplace_back(nu + np, nu + j, m(j));
  }
  SparseMatrix K(size, size);
  K.setFromTriplets(trip.begin(), trip.end());
  Eigen::SparseLU<SparseMatrix> lu;
  lu.compute(K);
  const Eigen::VectorXd x = lu.solve(rhs);

  Eigen::VectorXd v = fixed;
  for (int i = 0; i < n; ++i)
    if (unknown[i] >= 0) v(i) = x(unknown[i]);
  return {disc.extend_velocity(v), x.segment(nu, np)};
}

}  // namespace tresca::oracle
