#include "tresca/fe.hpp"

#include <cmath>
#include <map>
#include <utility>

namespace tresca {

namespace {

double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

}  // namespace

const std::vector<std::array<int, 2>>& local_edges(int dim) {
  static const std::vector<std::array<int, 2>> e2 = {{0, 1}, {0, 2}, {1, 2}};
  static const std::vector<std::array<int, 2>> e3 = {{0, 1}, {0, 2}, {0, 3},
                                                     {1, 2}, {1, 3}, {2, 3}};
  return dim == 2 ? e2 : e3;
}

ShapeTable make_shape_table(int dim, const QuadratureRule& rule) {
  ShapeTable t;
  t.dim = dim;
  t.rule = rule;
  const auto& edges = local_edges(dim);
  t.num_p2 = dim + 1 + static_cast<int>(edges.size());
  t.p2_value.resize(rule.size());
  t.p2_dlambda.resize(rule.size());
  for (std::size_t q = 0; q < rule.size(); ++q) {
    const Eigen::Vector4d& l = rule.barycentric[q];
    auto& val = t.p2_value[q];
    auto& dl = t.p2_dlambda[q];
    val.fill(0.0);
    for (auto& v : dl) v.setZero();
    for (int i = 0; i <= dim; ++i) {
      val[i] = l(i) * (2.0 * l(i) - 1.0);
      dl[i](i) = 4.0 * l(i) - 1.0;
    }
    for (std::size_t e = 0; e < edges.size(); ++e) {
      const int a = dim + 1 + static_cast<int>(e);
      const int i = edges[e][0], j = edges[e][1];
      val[a] = 4.0 * l(i) * l(j);
      dl[a](i) = 4.0 * l(j);
      dl[a](j) = 4.0 * l(i);
    }
  }
  return t;
}

Discretization::Discretization(Mesh mesh, int quadrature_degree)
    : mesh_(std::move(mesh)),
      table_(make_shape_table(mesh_.dim(), simplex_rule(mesh_.dim(), quadrature_degree))) {
  const int d = mesh_.dim();
  const auto& edges = local_edges(d);
  for (std::size_t v = 0; v < mesh_.num_vertices(); ++v) node_coords_.push_back(mesh_.vertex(v));

  std::map<std::pair<int, int>, int> edge_node;
  auto edge_id = [&](int a, int b) {
    const auto key = std::minmax(a, b);
    auto [it, inserted] = edge_node.try_emplace(key, static_cast<int>(node_coords_.size()));
    if (inserted) node_coords_.push_back(0.5 * (mesh_.vertex(a) + mesh_.vertex(b)));
    return it->second;
  };

  cell_nodes_.resize(mesh_.num_cells());
  for (std::size_t c = 0; c < mesh_.num_cells(); ++c) {
    auto& nodes = cell_nodes_[c];
    nodes.fill(-1);
    const auto& cell = mesh_.cell(c);
    for (int i = 0; i <= d; ++i) nodes[i] = cell[i];
    for (std::size_t e = 0; e < edges.size(); ++e)
      nodes[d + 1 + e] = edge_id(cell[edges[e][0]], cell[edges[e][1]]);
  }

  on_gamma0_.assign(node_coords_.size(), 0);
  on_dirichlet_.assign(node_coords_.size(), 0);
  const QuadratureRule nodal = facet_nodal_rule(d - 1);
  const double facet_scale = factorial(d - 1);
  for (std::size_t f = 0; f < mesh_.facets().size(); ++f) {
    const auto& facet = mesh_.facets()[f];
    const auto& v = facet.vertices;
    // node order of the nodal rule: v0, m01, v1 (segments) or
    // v0, m01, v1, m12, v2, m02 (triangles)
    std::vector<int> nodes;
    if (d == 2) {
      nodes = {v[0], edge_id(v[0], v[1]), v[1]};
    } else {
      nodes = {v[0], edge_id(v[0], v[1]), v[1], edge_id(v[1], v[2]), v[2], edge_id(v[0], v[2])};
    }
    auto& flag = facet.tag == FacetTag::gamma0 ? on_gamma0_ : on_dirichlet_;
    for (int n : nodes) flag[n] = 1;
    if (facet.tag != FacetTag::gamma0) continue;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      FrictionPoint fp;
      fp.facet = static_cast<int>(f);
      fp.node = nodes[i];
      fp.weight = nodal.weights[i] * facet.measure * facet_scale;
      fp.x = node_coords_[nodes[i]];
      friction_points_.push_back(fp);
    }
  }

  velocity_free_.assign(node_coords_.size() * d, -1);
  for (std::size_t n = 0; n < node_coords_.size(); ++n)
    for (int i = 0; i < d; ++i) {
      const bool fixed = on_dirichlet_[n] || (on_gamma0_[n] && i == d - 1);
      if (!fixed) velocity_free_[n * d + i] = num_velocity_free_++;
    }
  temperature_free_.assign(mesh_.num_vertices(), -1);
  for (std::size_t v = 0; v < mesh_.num_vertices(); ++v)
    if (!on_dirichlet_[v]) temperature_free_[v] = num_temperature_free_++;
}

void Discretization::p2_gradients(std::size_t c, std::size_t q,
                                  Eigen::Matrix<double, 10, 3>& grads) const {
  const auto& G = mesh_.barycentric_gradients(c);
  const auto& dl = table_.p2_dlambda[q];
  for (int a = 0; a < table_.num_p2; ++a) grads.row(a) = dl[a].transpose() * G;
}

Vec Discretization::quadrature_point(std::size_t c, std::size_t q) const {
  return mesh_.point(c, table_.rule.barycentric[q]);
}

double Discretization::quadrature_weight(std::size_t c, std::size_t q) const {
  return table_.rule.weights[q] * mesh_.cell_volume(c) * factorial(dim());
}

Eigen::VectorXd Discretization::restrict_velocity(const Eigen::VectorXd& full) const {
  Eigen::VectorXd out(num_velocity_free_);
  for (std::size_t i = 0; i < velocity_free_.size(); ++i)
    if (velocity_free_[i] >= 0) out(velocity_free_[i]) = full(i);
  return out;
}

Eigen::VectorXd Discretization::extend_velocity(const Eigen::VectorXd& free) const {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(velocity_size());
  for (std::size_t i = 0; i < velocity_free_.size(); ++i)
    if (velocity_free_[i] >= 0) out(i) = free(velocity_free_[i]);
  return out;
}

Eigen::VectorXd Discretization::restrict_temperature(const Eigen::VectorXd& full) const {
  Eigen::VectorXd out(num_temperature_free_);
  for (std::size_t i = 0; i < temperature_free_.size(); ++i)
    if (temperature_free_[i] >= 0) out(temperature_free_[i]) = full(i);
  return out;
}

Eigen::VectorXd Discretization::extend_temperature(const Eigen::VectorXd& free) const {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(num_vertices());
  for (std::size_t i = 0; i < temperature_free_.size(); ++i)
    if (temperature_free_[i] >= 0) out(i) = free(temperature_free_[i]);
  return out;
}

Eigen::VectorXd interpolate_velocity(const Discretization& disc, const VectorFn& fn) {
  const int d = disc.dim();
  Eigen::VectorXd out(disc.velocity_size());
  for (int n = 0; n < disc.num_nodes(); ++n) {
    const Vec v = fn(disc.node(n));
    if (v.size() != d) throw DomainError("vector field has wrong dimension");
    for (int i = 0; i < d; ++i) out(n * d + i) = v(i);
  }
  return out;
}

Eigen::VectorXd interpolate_p1(const Discretization& disc, const ScalarFn& fn) {
  Eigen::VectorXd out(disc.num_vertices());
  for (int v = 0; v < disc.num_vertices(); ++v) out(v) = fn(disc.node(v));
  return out;
}

void for_each_velocity_sample(const Discretization& disc, const Eigen::VectorXd& u,
                              const std::function<void(const VelocitySample&)>& fn) {
  const int d = disc.dim();
  const auto& table = disc.shapes();
  Eigen::Matrix<double, 10, 3> grads;
  VelocitySample s;
  for (std::size_t c = 0; c < disc.mesh().num_cells(); ++c) {
    const auto& nodes = disc.cell_nodes(c);
    for (std::size_t q = 0; q < table.rule.size(); ++q) {
      disc.p2_gradients(c, q, grads);
      s.cell = c;
      s.x = disc.quadrature_point(c, q);
      s.weight = disc.quadrature_weight(c, q);
      s.value = Vec::Zero(d);
      s.grad = Mat::Zero(d, d);
      for (int a = 0; a < table.num_p2; ++a) {
        for (int i = 0; i < d; ++i) {
          const double coef = u(nodes[a] * d + i);
          s.value(i) += coef * table.p2_value[q][a];
          s.grad.row(i) += coef * grads.row(a).head(d);
        }
      }
      fn(s);
    }
  }
}

void for_each_p1_sample(const Discretization& disc, const Eigen::VectorXd& theta,
                        const std::function<void(const ScalarSample&)>& fn) {
  const int d = disc.dim();
  const auto& rule = disc.shapes().rule;
  ScalarSample s;
  for (std::size_t c = 0; c < disc.mesh().num_cells(); ++c) {
    const auto& cell = disc.mesh().cell(c);
    const auto& G = disc.mesh().barycentric_gradients(c);
    s.cell = c;
    s.grad = Vec::Zero(d);
    for (int i = 0; i <= d; ++i) s.grad += theta(cell[i]) * G.row(i).head(d).transpose();
    for (std::size_t q = 0; q < rule.size(); ++q) {
      s.x = disc.quadrature_point(c, q);
      s.weight = disc.quadrature_weight(c, q);
      s.value = 0.0;
      for (int i = 0; i <= d; ++i) s.value += rule.barycentric[q](i) * theta(cell[i]);
      fn(s);
    }
  }
}

double velocity_w1p(const Discretization& disc, const Eigen::VectorXd& u, double p) {
  double sum = 0.0;
  for_each_velocity_sample(disc, u, [&](const VelocitySample& s) {
    sum += s.weight * std::pow(s.grad.norm(), p);
  });
  return std::pow(sum, 1.0 / p);
}

double strain_lp(const Discretization& disc, const Eigen::VectorXd& u, double p) {
  double sum = 0.0;
  for_each_velocity_sample(disc, u, [&](const VelocitySample& s) {
    sum += s.weight * std::pow((0.5 * (s.grad + s.grad.transpose())).norm(), p);
  });
  return std::pow(sum, 1.0 / p);
}

double velocity_lp(const Discretization& disc, const Eigen::VectorXd& u, double p) {
  double sum = 0.0;
  for_each_velocity_sample(disc, u, [&](const VelocitySample& s) {
    sum += s.weight * std::pow(s.value.norm(), p);
  });
  return std::pow(sum, 1.0 / p);
}

double velocity_full_w1p(const Discretization& disc, const Eigen::VectorXd& u, double p) {
  double sum = 0.0;
  for_each_velocity_sample(disc, u, [&](const VelocitySample& s) {
    sum += s.weight * (std::pow(s.value.norm(), p) + std::pow(s.grad.norm(), p));
  });
  return std::pow(sum, 1.0 / p);
}

double temperature_w1q(const Discretization& disc, const Eigen::VectorXd& theta, double q) {
  const int d = disc.dim();
  double sum = 0.0;
  for (std::size_t c = 0; c < disc.mesh().num_cells(); ++c) {
    const auto& cell = disc.mesh().cell(c);
    const auto& G = disc.mesh().barycentric_gradients(c);
    Vec g = Vec::Zero(d);
    for (int i = 0; i <= d; ++i) g += theta(cell[i]) * G.row(i).head(d).transpose();
    sum += disc.mesh().cell_volume(c) * std::pow(g.norm(), q);
  }
  return std::pow(sum, 1.0 / q);
}

double temperature_lq(const Discretization& disc, const Eigen::VectorXd& theta, double q) {
  double sum = 0.0;
  for_each_p1_sample(disc, theta, [&](const ScalarSample& s) {
    sum += s.weight * std::pow(std::abs(s.value), q);
  });
  return std::pow(sum, 1.0 / q);
}

Eigen::VectorXd p1_mass_vector(const Discretization& disc) {
  const int d = disc.dim();
  Eigen::VectorXd m = Eigen::VectorXd::Zero(disc.num_vertices());
  for (std::size_t c = 0; c < disc.mesh().num_cells(); ++c)
    for (int i = 0; i <= d; ++i) m(disc.mesh().cell(c)[i]) += disc.mesh().cell_volume(c) / (d + 1);
  return m;
}

}  // namespace tresca
