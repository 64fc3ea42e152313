#pragma once

#include <optional>

namespace tresca {

/// Admissible temperature exponents q for a velocity exponent p:
/// [q_min, 3/2) or (q_min, 3/2) depending on `q_min_included`.
struct CompatibilityWindow {
  double p = 0.0;
  double q_min = 1.0;
  double q_max = 1.5;
  bool q_min_included = true;
  bool contains(double q) const {
    return (q_min_included ? q >= q_min : q > q_min) && q < q_max;
  }
};

CompatibilityWindow valid_q_range(double p);

/// Smallest admissible p for a given q; `strict` means p must exceed it.
struct PThreshold {
  double p = 0.0;
  bool strict = false;
  bool admits(double candidate) const { return strict ? candidate > p : candidate >= p; }
};

PThreshold min_p_for_q(double q);

/// The map t -> 3t / (4t - 3).
inline double compatibility_curve(double t) { return 3.0 * t / (4.0 * t - 3.0); }

struct TruncationExponents {
  double q = 1.0;
  double zeta = 0.5;
  double q_star = 1.5;  ///< 3q / (3 - q)
  double rho = 1.5;     ///< (zeta + 1) q / (2 - q)
  double alpha = 0.75;  ///< q_star (2 - q) / (2q)
};

/// Without `zeta` the maximal value (3 - 2q)/(3 - q) is used, for which
/// rho == q_star.
TruncationExponents truncation_exponents(double q, std::optional<double> zeta = std::nullopt);

/// Functional-inequality constants estimated on the discrete spaces, plus
/// the data bounds they are combined with. Values are numerical estimates,
/// never certificates.
struct EstimateConstants {
  double mu0 = 1.0;
  double mu1 = 1.0;
  double k0 = 1.0;
  double p = 2.0;
  double q = 1.25;
  double korn = 1.0;         ///< ||D(u)||_p >= korn ||u||_{1.p}
  double poincare_p = 1.0;   ///< ||u||_p <= poincare_p ||u||_{1.p} (velocity space)
  double poincare_2 = 1.0;   ///< ||w||_2 <= poincare_2 ||w||_{1.2} (temperature space)
  double trace = 1.0;        ///< ||w||_{L2(boundary)} <= trace ||w||_{1.2}
  double embedding_q = 1.0;  ///< ||w||_{q_star} <= embedding_q ||w||_{1.q}
  double omega_measure = 1.0;
  double gamma0_measure = 1.0;
  bool certified = false;
};

/// Norm inputs of the a-priori velocity estimate.
struct FlowDataNorms {
  double f_norm = 0.0;     ///< ||f||_{L^{p'}}
  double G_norm = 0.0;     ///< ||G||_{1.p}
  double DG_norm = 0.0;    ///< ||D(G)||_{L^p}
  double psi_zero = 0.0;   ///< Psi(0) = int_{Gamma0} k |G - s|
};

/// Lambda(t) = [(C_P ||f|| t + Psi(0) + 2 mu1 (t + ||G||)^{p-1} ||G||) / (2 mu0)]^{1/p} / t
///             + ||D(G)|| / t - C_Korn.
/// A flow solution with ||v||_{1.p} = t > 0 forces Lambda(t) >= 0.
double flow_bound_lambda(const EstimateConstants& c, double p, const FlowDataNorms& n, double t);

struct FlowBound {
  double t_star = 0.0;
  double lambda_at_t_star = 0.0;
  int bisection_steps = 0;
};

/// Smallest t* (to 1e-8 relative) with Lambda(t) < 0 for all t > t*;
/// bracketed on the grid t = 2^j, j = -20..40, then bisected.
FlowBound c_flow_bound(const EstimateConstants& c, double p, const FlowDataNorms& n);

struct HeatBound {
  TruncationExponents exponents;
  double c1 = 0.0;
  double bound = 1.0;
};

/// energy_term = 2 mu1 ||D(v+G)||_p^p + |Omega| ||r||_inf + ||theta_b||_{L1(Gamma0)}.
HeatBound c_heat_bound(const EstimateConstants& c, double q, double energy_term);

/// W^{1,2} bound of the linearized heat solution at fixed delta:
/// (C'_P (1/delta + ||r||_inf) |Omega|^{1/2} + C_gamma |Gamma0|^{1/2} / delta) / k0.
double r_delta_bound(const EstimateConstants& c, double delta, double r_sup);

}  // namespace tresca
