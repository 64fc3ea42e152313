#include "tresca/exponents.hpp"

#include "tresca/types.hpp"

#include <algorithm>
#include <cmath>

namespace tresca {

CompatibilityWindow valid_q_range(double p) {
  if (!(p > 1.5)) throw DomainError("no admissible q for p <= 3/2");
  CompatibilityWindow w;
  w.p = p;
  if (p > 3.0) {
    w.q_min = 1.0;
    w.q_min_included = true;
  } else if (p == 3.0) {
    w.q_min = 1.0;
    w.q_min_included = false;
  } else {
    w.q_min = compatibility_curve(p);
    w.q_min_included = true;
  }
  return w;
}

PThreshold min_p_for_q(double q) {
  if (!(q >= 1.0 && q < 1.5)) throw DomainError("q must lie in [1, 3/2)");
  if (q == 1.0) return {3.0, true};
  return {compatibility_curve(q), false};
}

TruncationExponents truncation_exponents(double q, std::optional<double> zeta) {
  if (!(q >= 1.0 && q < 1.5)) throw DomainError("q must lie in [1, 3/2)");
  const double zeta_max = (3.0 - 2.0 * q) / (3.0 - q);
  TruncationExponents t;
  t.q = q;
  t.q_star = 3.0 * q / (3.0 - q);
  if (zeta) {
    if (!(*zeta > 0.0 && *zeta <= zeta_max)) throw DomainError("zeta outside (0, (3-2q)/(3-q)]");
    t.zeta = *zeta;
    t.rho = (t.zeta + 1.0) * q / (2.0 - q);
  } else {
    t.zeta = zeta_max;
    t.rho = t.q_star;
  }
  t.alpha = t.q_star * (2.0 - q) / (2.0 * q);
  return t;
}

double flow_bound_lambda(const EstimateConstants& c, double p, const FlowDataNorms& n, double t) {
  const double energy = c.poincare_p * n.f_norm * t + n.psi_zero +
                        2.0 * c.mu1 * std::pow(t + n.G_norm, p - 1.0) * n.G_norm;
  return std::pow(energy / (2.0 * c.mu0), 1.0 / p) / t + n.DG_norm / t - c.korn;
}

FlowBound c_flow_bound(const EstimateConstants& c, double p, const FlowDataNorms& n) {
  if (n.f_norm < 0 || n.G_norm < 0 || n.DG_norm < 0 || n.psi_zero < 0)
    throw DomainError("norms must be nonnegative");
  if (!(c.korn > 0 && c.mu0 > 0 && c.poincare_p > 0)) throw DomainError("constants must be positive");
  FlowBound out;
  if (n.f_norm == 0 && n.G_norm == 0 && n.DG_norm == 0 && n.psi_zero == 0) {
    out.t_star = 0.0;
    out.lambda_at_t_star = -c.korn;
    return out;
  }
  // Lambda is strictly decreasing in t for nonzero data, so the grid search
  // finds the unique sign change.
  auto lam = [&](double t) { return flow_bound_lambda(c, p, n, t); };
  if (lam(std::ldexp(1.0, 40)) >= 0.0)
    throw SolverError("a-priori velocity bound: no bracket below 2^40 (data inadmissible)");
  int j = 40;
  while (j > -1000 && lam(std::ldexp(1.0, j - 1)) < 0.0) --j;
  if (j <= -1000) return out;  // root below double range
  double lo = std::ldexp(1.0, j - 1), hi = std::ldexp(1.0, j);
  while (hi - lo > 1e-8 * hi) {
    const double mid = 0.5 * (lo + hi);
    (lam(mid) < 0.0 ? hi : lo) = mid;
    ++out.bisection_steps;
  }
  out.t_star = hi;
  out.lambda_at_t_star = lam(hi);
  return out;
}

HeatBound c_heat_bound(const EstimateConstants& c, double q, double energy_term) {
  if (!(energy_term >= 0.0)) throw DomainError("energy term must be nonnegative");
  if (!(c.k0 > 0.0)) throw DomainError("k0 must be positive");
  HeatBound h;
  h.exponents = truncation_exponents(q);
  const auto& e = h.exponents;
  h.c1 = std::sqrt(energy_term / (c.k0 * e.zeta));
  const double outer = 2.0 * (3.0 - q) / q;
  const double value = std::pow(h.c1, outer) *
                       std::pow(2.0, (4.0 * q - 3.0) * (2.0 - q) / (q * q)) *
                       std::pow(std::pow(c.omega_measure, (2.0 - q) / (2.0 * q)) +
                                    std::pow(c.embedding_q, e.alpha),
                                outer);
  h.bound = std::max(1.0, value);
  return h;
}

double r_delta_bound(const EstimateConstants& c, double delta, double r_sup) {
  if (!(delta > 0.0)) throw DomainError("delta must be positive");
  return (c.poincare_2 * (1.0 / delta + r_sup) * std::sqrt(c.omega_measure) +
          c.trace * std::sqrt(c.gamma0_measure) / delta) /
         c.k0;
}

}  // namespace tresca
