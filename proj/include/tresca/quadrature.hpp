#pragma once

#include "tresca/types.hpp"

#include <vector>

namespace tresca {

/// Quadrature on the reference simplex of dimension `dim` (0..3), points in
/// barycentric coordinates (dim + 1 entries), weights summing to 1/dim!.
struct QuadratureRule {
  int dim = 0;
  int degree = 0;
  std::vector<Eigen::Vector4d> barycentric;
  std::vector<double> weights;
  std::size_t size() const { return weights.size(); }
};

/// Gauss-Legendre nodes and weights on [0, 1].
void gauss_legendre_unit(int n, std::vector<double>& nodes, std::vector<double>& weights);

/// Collapsed-coordinate (Duffy) product rule exact for polynomials of total
/// degree <= `degree`.
QuadratureRule simplex_rule(int dim, int degree);

/// Nodal rule on the vertices and edge midpoints of a facet (dim 1 or 2)
/// with positive weights: Simpson on segments, equal weights on triangles.
QuadratureRule facet_nodal_rule(int dim);

}  // namespace tresca
