#include "tresca/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <utility>

namespace tresca {

namespace {

// Returns (P_n(x), P_{n-1}(x)) by the three-term recurrence.
std::pair<double, double> legendre(int n, double x) {
  double p0 = 1.0, p1 = x;
  if (n == 0) return {1.0, 0.0};
  for (int k = 2; k <= n; ++k) {
    const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
    p0 = p1;
    p1 = pk;
  }
  return {p1, p0};
}

}  // namespace

void gauss_legendre_unit(int n, std::vector<double>& nodes, std::vector<double>& weights) {
  nodes.assign(n, 0.0);
  weights.assign(n, 0.0);
  for (int i = 0; i < n; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    for (int it = 0; it < 100; ++it) {
      const auto [pn, pm] = legendre(n, x);
      const double dx = pn / (n * (x * pn - pm) / (x * x - 1.0));
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const auto [pn, pm] = legendre(n, x);
    const double dp = n * (x * pn - pm) / (x * x - 1.0);
    nodes[i] = 0.5 * (1.0 - x);
    weights[i] = 1.0 / ((1.0 - x * x) * dp * dp);
  }
}

QuadratureRule simplex_rule(int dim, int degree) {
  if (dim < 0 || dim > 3) throw DomainError("simplex dimension must be 0..3");
  if (degree < 0) throw DomainError("quadrature degree must be nonnegative");
  QuadratureRule rule;
  rule.dim = dim;
  rule.degree = degree;
  if (dim == 0) {
    rule.barycentric.push_back(Eigen::Vector4d(1, 0, 0, 0));
    rule.weights.push_back(1.0);
    return rule;
  }
  std::vector<double> x, w;
  const int n = (degree + dim) / 2 + 1;
  gauss_legendre_unit(n, x, w);
  if (dim == 1) {
    for (int i = 0; i < n; ++i) {
      rule.barycentric.push_back(Eigen::Vector4d(1.0 - x[i], x[i], 0, 0));
      rule.weights.push_back(w[i]);
    }
  } else if (dim == 2) {
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        const double xi = x[i], eta = x[j] * (1.0 - x[i]);
        rule.barycentric.push_back(Eigen::Vector4d(1.0 - xi - eta, xi, eta, 0));
        rule.weights.push_back(w[i] * w[j] * (1.0 - x[i]));
      }
  } else {
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) {
          const double xi = x[i];
          const double eta = x[j] * (1.0 - x[i]);
          const double zeta = x[k] * (1.0 - x[i]) * (1.0 - x[j]);
          rule.barycentric.push_back(Eigen::Vector4d(1.0 - xi - eta - zeta, xi, eta, zeta));
          rule.weights.push_back(w[i] * w[j] * w[k] * (1.0 - x[i]) * (1.0 - x[i]) * (1.0 - x[j]));
        }
  }
  return rule;
}

QuadratureRule facet_nodal_rule(int dim) {
  QuadratureRule rule;
  rule.dim = dim;
  if (dim == 1) {
    rule.degree = 3;
    rule.barycentric = {Eigen::Vector4d(1, 0, 0, 0), Eigen::Vector4d(0.5, 0.5, 0, 0),
                        Eigen::Vector4d(0, 1, 0, 0)};
    rule.weights = {1.0 / 6.0, 4.0 / 6.0, 1.0 / 6.0};
  } else if (dim == 2) {
    rule.degree = 1;
    rule.barycentric = {Eigen::Vector4d(1, 0, 0, 0),     Eigen::Vector4d(0.5, 0.5, 0, 0),
                        Eigen::Vector4d(0, 1, 0, 0),     Eigen::Vector4d(0, 0.5, 0.5, 0),
                        Eigen::Vector4d(0, 0, 1, 0),     Eigen::Vector4d(0.5, 0, 0.5, 0)};
    rule.weights.assign(6, 1.0 / 12.0);
  } else {
    throw DomainError("nodal facet rule needs facet dimension 1 or 2");
  }
  return rule;
}

}  // namespace tresca
