#pragma once

#include "tresca/config.hpp"
#include "tresca/exponents.hpp"
#include "tresca/fe.hpp"

#include <cstdint>

namespace tresca {

/// Quadratic forms on the free velocity DOFs.
struct VelocityForms {
  SparseMatrix grad;    ///< int grad u : grad w
  SparseMatrix strain;  ///< int D(u) : D(w)
  SparseMatrix mass;    ///< int u . w
};

/// Quadratic forms on the free temperature DOFs.
struct TemperatureForms {
  SparseMatrix stiffness;  ///< int grad t . grad w
  SparseMatrix mass;       ///< int t w
  SparseMatrix gamma0;     ///< int_{Gamma0} t w
};

VelocityForms velocity_forms(const Discretization& disc);
TemperatureForms temperature_forms(const Discretization& disc);

struct GeneralizedEigen {
  double value = 0.0;
  Eigen::VectorXd vector;  ///< A-normalized
  int iterations = 0;
};

/// Largest nu with B x = nu A x, A symmetric positive definite, B symmetric
/// positive semidefinite. Block subspace iteration with a Rayleigh-Ritz step;
/// the start block is drawn from `seed`.
GeneralizedEigen largest_generalized_eigenvalue(const SparseMatrix& B, const SparseMatrix& A,
                                                std::uint64_t seed = 1, double tol = 1e-12,
                                                int max_iterations = 2000);

struct ConstantsOptions {
  std::uint64_t seed = 7;
  int random_starts = 2;
  int descent_steps = 80;
};

/// Functional-inequality constants on the discrete spaces of `disc`. p = 2
/// values come from generalized eigenvalues; the others from ascent on the
/// norm ratio started at the p = 2 extremal field and random fields. The
/// data fields (mu0, mu1, k0) are left at 1; see `with_data`.
EstimateConstants estimate_constants(const Discretization& disc, double p, double q,
                                     const ConstantsOptions& options = {});

/// Copies mu0, mu1, k0 from the configuration.
EstimateConstants with_data(EstimateConstants c, const ProblemConfig& config);

/// Norm inputs of the velocity bound for the flow data of a configuration.
FlowDataNorms flow_data_norms(const Discretization& disc, const ProblemConfig& config);

}  // namespace tresca
