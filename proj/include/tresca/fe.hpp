#pragma once

#include "tresca/mesh.hpp"
#include "tresca/quadrature.hpp"

#include <Eigen/Sparse>

#include <array>
#include <functional>
#include <vector>

namespace tresca {

using SparseMatrix = Eigen::SparseMatrix<double>;

/// Values and barycentric derivatives of the local P2 basis at the points of
/// a quadrature rule. Local order: the dim + 1 vertex functions
/// lambda_i (2 lambda_i - 1), then the edge functions 4 lambda_i lambda_j
/// over pairs i < j in lexicographic order.
struct ShapeTable {
  int dim = 2;
  int num_p2 = 6;
  QuadratureRule rule;
  std::vector<std::array<double, 10>> p2_value;                // [q][a]
  std::vector<std::array<Eigen::Vector4d, 10>> p2_dlambda;     // [q][a]
};

ShapeTable make_shape_table(int dim, const QuadratureRule& rule);

/// Local edge pairs in the order used for the P2 edge nodes.
const std::vector<std::array<int, 2>>& local_edges(int dim);

/// One point of the nodal Gamma0 rule; each point sits on a P2 node.
struct FrictionPoint {
  int facet = -1;   ///< index into Mesh::facets()
  int node = -1;    ///< P2 node
  double weight = 0.0;
  Vec x;
};

/// P2 velocity, P1 pressure and P1 temperature spaces on one mesh, with the
/// constrained-DOF tables:
///  - velocity: all components fixed on Gamma1 and lateral nodes, the last
///    (normal) component fixed on the remaining Gamma0 nodes;
///  - temperature: fixed on Gamma1 and lateral vertices;
///  - pressure: unconstrained, zero mean enforced by the solvers.
/// Velocity coefficient vectors are node-major: entry node * dim + comp.
/// P2 nodes [0, num_vertices) coincide with mesh vertices.
class Discretization {
 public:
  explicit Discretization(Mesh mesh, int quadrature_degree = 4);

  const Mesh& mesh() const { return mesh_; }
  int dim() const { return mesh_.dim(); }
  int quadrature_degree() const { return table_.rule.degree; }
  const ShapeTable& shapes() const { return table_; }

  int num_nodes() const { return static_cast<int>(node_coords_.size()); }
  int num_vertices() const { return static_cast<int>(mesh_.num_vertices()); }
  int num_local_nodes() const { return table_.num_p2; }
  const std::array<int, 10>& cell_nodes(std::size_t c) const { return cell_nodes_[c]; }
  const Vec& node(int n) const { return node_coords_[n]; }
  bool node_on_gamma0(int n) const { return on_gamma0_[n]; }
  bool node_on_dirichlet(int n) const { return on_dirichlet_[n]; }

  int velocity_size() const { return num_nodes() * dim(); }
  int num_velocity_free() const { return num_velocity_free_; }
  /// Full velocity index -> free index, or -1 when constrained.
  const std::vector<int>& velocity_free() const { return velocity_free_; }
  int num_temperature_free() const { return num_temperature_free_; }
  const std::vector<int>& temperature_free() const { return temperature_free_; }

  const std::vector<FrictionPoint>& friction_points() const { return friction_points_; }

  /// Gradients of the local P2 basis at quadrature point q of cell c
  /// (rows = local functions, only the first dim columns used).
  void p2_gradients(std::size_t c, std::size_t q, Eigen::Matrix<double, 10, 3>& grads) const;
  /// Physical quadrature point and weight (reference weight times |K| d!).
  Vec quadrature_point(std::size_t c, std::size_t q) const;
  double quadrature_weight(std::size_t c, std::size_t q) const;

  Eigen::VectorXd restrict_velocity(const Eigen::VectorXd& full) const;
  Eigen::VectorXd extend_velocity(const Eigen::VectorXd& free) const;
  Eigen::VectorXd restrict_temperature(const Eigen::VectorXd& full) const;
  Eigen::VectorXd extend_temperature(const Eigen::VectorXd& free) const;

 private:
  Mesh mesh_;
  ShapeTable table_;
  std::vector<std::array<int, 10>> cell_nodes_;
  std::vector<Vec> node_coords_;
  std::vector<char> on_gamma0_, on_dirichlet_;
  std::vector<int> velocity_free_, temperature_free_;
  int num_velocity_free_ = 0, num_temperature_free_ = 0;
  std::vector<FrictionPoint> friction_points_;
};

/// Nodal interpolation onto the full P2 velocity vector (no constraints).
Eigen::VectorXd interpolate_velocity(const Discretization& disc, const VectorFn& fn);
/// Nodal interpolation onto P1 vertex values.
Eigen::VectorXd interpolate_p1(const Discretization& disc, const ScalarFn& fn);

/// Velocity u_h and its gradient at one quadrature point.
struct VelocitySample {
  std::size_t cell = 0;
  Vec x;
  double weight = 0.0;
  Vec value;
  Mat grad;  ///< grad(i, j) = d u_i / d x_j
};

void for_each_velocity_sample(const Discretization& disc, const Eigen::VectorXd& u,
                              const std::function<void(const VelocitySample&)>& fn);

/// P1 value and (cellwise constant) gradient at the quadrature points.
struct ScalarSample {
  std::size_t cell = 0;
  Vec x;
  double weight = 0.0;
  double value = 0.0;
  Vec grad;
};

void for_each_p1_sample(const Discretization& disc, const Eigen::VectorXd& theta,
                        const std::function<void(const ScalarSample&)>& fn);

/// (int |grad u|^p)^{1/p}, the norm ||.||_{1.p} of the constrained spaces.
double velocity_w1p(const Discretization& disc, const Eigen::VectorXd& u, double p);
/// (int |D(u)|^p)^{1/p}.
double strain_lp(const Discretization& disc, const Eigen::VectorXd& u, double p);
/// (int |u|^p)^{1/p}.
double velocity_lp(const Discretization& disc, const Eigen::VectorXd& u, double p);
/// (int |u|^p + |grad u|^p)^{1/p}, used for the extension G.
double velocity_full_w1p(const Discretization& disc, const Eigen::VectorXd& u, double p);

double temperature_w1q(const Discretization& disc, const Eigen::VectorXd& theta, double q);
double temperature_lq(const Discretization& disc, const Eigen::VectorXd& theta, double q);

/// Mean-value functional m_j = int psi_j over P1 vertex functions.
Eigen::VectorXd p1_mass_vector(const Discretization& disc);

}  // namespace tresca
