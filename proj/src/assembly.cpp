#include "tresca/assembly.hpp"
#include "tresca/parallel.hpp"

#include <algorithm>
#include <cmath>

namespace tresca {

namespace {

double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

double theta_at(const Mesh& mesh, std::size_t c, const Eigen::Vector4d& bary,
                const Eigen::VectorXd& theta) {
  double t = 0.0;
  for (int i = 0; i <= mesh.dim(); ++i) t += bary(i) * theta(mesh.cell(c)[i]);
  return t;
}

}  // namespace

// ---------------------------------------------------------------------------

ScatterPlan::ScatterPlan(int rows, int cols, const std::vector<std::vector<int>>& row_dofs,
                         const std::vector<std::vector<int>>& col_dofs)
    : rows_(row_dofs) {
  std::vector<Eigen::Triplet<double>> triplets;
  for (std::size_t c = 0; c < row_dofs.size(); ++c)
    for (int r : row_dofs[c])
      for (int k : col_dofs[c])
        if (r >= 0 && k >= 0) triplets.emplace_back(r, k, 0.0);
  pattern_.resize(rows, cols);
  pattern_.setFromTriplets(triplets.begin(), triplets.end());
  pattern_.makeCompressed();

  const int* outer = pattern_.outerIndexPtr();
  const int* inner = pattern_.innerIndexPtr();
  slots_.resize(row_dofs.size());
  for (std::size_t c = 0; c < row_dofs.size(); ++c) {
    auto& slot = slots_[c];
    slot.reserve(row_dofs[c].size() * col_dofs[c].size());
    for (int r : row_dofs[c])
      for (int k : col_dofs[c]) {
        if (r < 0 || k < 0) {
          slot.push_back(-1);
          continue;
        }
        const int* pos = std::lower_bound(inner + outer[k], inner + outer[k + 1], r);
        slot.push_back(static_cast<int>(pos - inner));
      }
  }
}

void ScatterPlan::add(SparseMatrix& target, std::size_t cell, const Eigen::MatrixXd& local) const {
  double* values = target.valuePtr();
  const auto& slot = slots_[cell];
  const Eigen::Index nc = local.cols();
  for (Eigen::Index i = 0; i < local.rows(); ++i)
    for (Eigen::Index j = 0; j < nc; ++j) {
      const int s = slot[i * nc + j];
      if (s >= 0) values[s] += local(i, j);
    }
}

void ScatterPlan::add_vector(Eigen::VectorXd& target, std::size_t cell,
                             const Eigen::VectorXd& local) const {
  const auto& rows = rows_[cell];
  for (std::size_t i = 0; i < rows.size(); ++i)
    if (rows[i] >= 0) target(rows[i]) += local(i);
}

std::vector<std::vector<int>> velocity_cell_dofs(const Discretization& disc) {
  const int d = disc.dim();
  std::vector<std::vector<int>> dofs(disc.mesh().num_cells());
  for (std::size_t c = 0; c < dofs.size(); ++c) {
    const auto& nodes = disc.cell_nodes(c);
    for (int a = 0; a < disc.num_local_nodes(); ++a)
      for (int i = 0; i < d; ++i) dofs[c].push_back(disc.velocity_free()[nodes[a] * d + i]);
  }
  return dofs;
}

std::vector<std::vector<int>> temperature_cell_dofs(const Discretization& disc) {
  std::vector<std::vector<int>> dofs(disc.mesh().num_cells());
  for (std::size_t c = 0; c < dofs.size(); ++c)
    for (int i = 0; i <= disc.dim(); ++i)
      dofs[c].push_back(disc.temperature_free()[disc.mesh().cell(c)[i]]);
  return dofs;
}

std::vector<std::vector<int>> pressure_cell_dofs(const Discretization& disc) {
  std::vector<std::vector<int>> dofs(disc.mesh().num_cells());
  for (std::size_t c = 0; c < dofs.size(); ++c)
    for (int i = 0; i <= disc.dim(); ++i) dofs[c].push_back(disc.mesh().cell(c)[i]);
  return dofs;
}

// ---------------------------------------------------------------------------

FlowAssembler::FlowAssembler(const Discretization& disc, const ViscosityModel& model, double p,
                             double eps_reg)
    : disc_(&disc), model_(model), p_(p), eps_reg_(eps_reg) {
  if (!(p > 1.0)) throw DomainError("power-law index p must exceed 1");
  if (disc.quadrature_degree() < static_cast<int>(std::ceil(p)) + 1)
    throw DomainError("quadrature degree too low for the flow form");
  if (!(eps_reg >= 0.0)) throw DomainError("strain regularization must be nonnegative");
  dofs_ = velocity_cell_dofs(disc);
  plan_ = ScatterPlan(disc.num_velocity_free(), disc.num_velocity_free(), dofs_, dofs_);
}

FlowOperator FlowAssembler::evaluate(const Eigen::VectorXd& theta_frozen,
                                     const Eigen::VectorXd& u_frozen, const Eigen::VectorXd& u,
                                     const Eigen::VectorXd& load, Execution exec,
                                     bool with_jacobian) const {
  const Discretization& disc = *disc_;
  const Mesh& mesh = disc.mesh();
  const int d = disc.dim();
  const int nb = disc.num_local_nodes();
  const int nloc = nb * d;
  const auto& table = disc.shapes();
  const std::size_t ncells = mesh.num_cells();

  std::vector<Eigen::VectorXd> local_res(ncells);
  std::vector<Eigen::MatrixXd> local_jac(with_jacobian ? ncells : 0);

  for_cells(ncells, exec, [&](std::size_t c) {
    Eigen::VectorXd res = Eigen::VectorXd::Zero(nloc);
    Eigen::MatrixXd jac;
    if (with_jacobian) jac = Eigen::MatrixXd::Zero(nloc, nloc);
    Eigen::Matrix<double, 10, 3> grads;
    const auto& nodes = disc.cell_nodes(c);
    for (std::size_t q = 0; q < table.rule.size(); ++q) {
      disc.p2_gradients(c, q, grads);
      const double w = disc.quadrature_weight(c, q);
      Mat Du = Mat::Zero(d, d);
      Vec uf = Vec::Zero(d);
      for (int a = 0; a < nb; ++a)
        for (int i = 0; i < d; ++i) {
          Du.row(i) += u(nodes[a] * d + i) * grads.row(a).head(d);
          uf(i) += u_frozen(nodes[a] * d + i) * table.p2_value[q][a];
        }
      const Mat D = sym(Du);
      const double theta = theta_at(mesh, c, table.rule.barycentric[q], theta_frozen);
      const double s = std::sqrt(D.squaredNorm() + eps_reg_ * eps_reg_);
      if (s == 0.0) continue;  // p >= 2 with eps = 0 at rest: zero stress
      const double mu = eval_viscosity(model_, theta, uf, s);
      const double m = mu * std::pow(s, p_ - 2.0);
      const Mat sigma = 2.0 * m * D;

      for (int a = 0; a < nb; ++a) {
        const Vec ga = grads.row(a).head(d).transpose();
        const Vec sg = sigma * ga;
        for (int i = 0; i < d; ++i) res(a * d + i) += w * sg(i);
      }
      if (!with_jacobian) continue;
      const double dmu = model_.derivative(theta, s);
      const double mprime = dmu * std::pow(s, p_ - 2.0) + mu * (p_ - 2.0) * std::pow(s, p_ - 3.0);
      const double coef = mprime / s;
      for (int a = 0; a < nb; ++a) {
        const Vec ga = grads.row(a).head(d).transpose();
        const Vec Dga = D * ga;
        for (int b = 0; b < nb; ++b) {
          const Vec gb = grads.row(b).head(d).transpose();
          const Vec Dgb = D * gb;
          const double gab = ga.dot(gb);
          for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) {
              const double dd = 0.5 * ((i == j ? gab : 0.0) + ga(j) * gb(i));
              jac(a * d + i, b * d + j) += w * 2.0 * (m * dd + coef * Dga(i) * Dgb(j));
            }
        }
      }
    }
    local_res[c] = std::move(res);
    if (with_jacobian) local_jac[c] = std::move(jac);
  });

  FlowOperator op;
  op.residual = Eigen::VectorXd::Zero(disc.num_velocity_free());
  for (std::size_t c = 0; c < ncells; ++c) plan_.add_vector(op.residual, c, local_res[c]);
  if (load.size() > 0) op.residual -= load;
  if (with_jacobian) {
    op.jacobian = plan_.zero_matrix();
    for (std::size_t c = 0; c < ncells; ++c) plan_.add(op.jacobian, c, local_jac[c]);
  }
  return op;
}

Eigen::VectorXd assemble_velocity_load(const Discretization& disc, const VectorFn& f) {
  const int d = disc.dim();
  const auto& table = disc.shapes();
  Eigen::VectorXd load = Eigen::VectorXd::Zero(disc.num_velocity_free());
  const auto& free = disc.velocity_free();
  for (std::size_t c = 0; c < disc.mesh().num_cells(); ++c) {
    const auto& nodes = disc.cell_nodes(c);
    for (std::size_t q = 0; q < table.rule.size(); ++q) {
      const Vec fx = f(disc.quadrature_point(c, q));
      const double w = disc.quadrature_weight(c, q);
      for (int a = 0; a < disc.num_local_nodes(); ++a)
        for (int i = 0; i < d; ++i) {
          const int idx = free[nodes[a] * d + i];
          if (idx >= 0) load(idx) += w * fx(i) * table.p2_value[q][a];
        }
    }
  }
  return load;
}

SparseMatrix divergence_matrix(const Discretization& disc, Execution exec) {
  const int d = disc.dim();
  const int nb = disc.num_local_nodes();
  const auto& table = disc.shapes();
  const auto rows = pressure_cell_dofs(disc);
  const auto cols = velocity_cell_dofs(disc);
  const ScatterPlan plan(disc.num_vertices(), disc.num_velocity_free(), rows, cols);
  const std::size_t ncells = disc.mesh().num_cells();
  std::vector<Eigen::MatrixXd> local(ncells);
  for_cells(ncells, exec, [&](std::size_t c) {
    Eigen::MatrixXd B = Eigen::MatrixXd::Zero(d + 1, nb * d);
    Eigen::Matrix<double, 10, 3> grads;
    for (std::size_t q = 0; q < table.rule.size(); ++q) {
      disc.p2_gradients(c, q, grads);
      const double w = disc.quadrature_weight(c, q);
      for (int j = 0; j <= d; ++j) {
        const double psi = table.rule.barycentric[q](j);
        for (int a = 0; a < nb; ++a)
          for (int i = 0; i < d; ++i) B(j, a * d + i) += w * psi * grads(a, i);
      }
    }
    local[c] = std::move(B);
  });
  SparseMatrix B = plan.zero_matrix();
  for (std::size_t c = 0; c < ncells; ++c) plan.add(B, c, local[c]);
  return B;
}

Eigen::VectorXd assemble_divergence(const Discretization& disc, const Eigen::VectorXd& u) {
  const int d = disc.dim();
  Eigen::VectorXd out = Eigen::VectorXd::Zero(disc.num_vertices());
  const auto& rule = disc.shapes().rule;
  std::size_t q = 0;
  for_each_velocity_sample(disc, u, [&](const VelocitySample& s) {
    const double div = s.grad.trace();
    const auto& cell = disc.mesh().cell(s.cell);
    const std::size_t qq = q++ % rule.size();
    for (int j = 0; j <= d; ++j) out(cell[j]) += s.weight * div * rule.barycentric[qq](j);
  });
  return out;
}

Eigen::VectorXd assemble_friction(const Discretization& disc, const std::vector<Vec>& lambda,
                                  const std::vector<double>& k) {
  const int d = disc.dim();
  const auto& points = disc.friction_points();
  if (lambda.size() != points.size() || k.size() != points.size())
    throw DomainError("friction data does not match the Gamma0 points");
  Eigen::VectorXd out = Eigen::VectorXd::Zero(disc.num_velocity_free());
  for (std::size_t i = 0; i < points.size(); ++i) {
    const double norm = lambda[i].head(d - 1).norm();
    if (norm > k[i] * (1.0 + 1e-12) + 1e-14)
      throw InvariantViolation("friction multiplier exceeds the threshold k at Gamma0 point " +
                               std::to_string(i));
    for (int j = 0; j < d - 1; ++j) {
      const int idx = disc.velocity_free()[points[i].node * d + j];
      if (idx >= 0) out(idx) += points[i].weight * lambda[i](j);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

double HeatSource::operator()(double theta) const {
  if (kind == Kind::constant) return r0;
  return r0 + r1 * std::tanh(theta / scale);
}

double HeatSource::sup() const {
  return kind == Kind::constant ? std::abs(r0) : std::abs(r0) + std::abs(r1);
}

HeatAssembler::HeatAssembler(const Discretization& disc, const Mat& K) : disc_(&disc), K_(K) {
  if (K.rows() != disc.dim() || K.cols() != disc.dim())
    throw DomainError("conductivity has wrong dimension");
  dofs_ = temperature_cell_dofs(disc);
  plan_ = ScatterPlan(disc.num_temperature_free(), disc.num_temperature_free(), dofs_, dofs_);
}

SparseMatrix HeatAssembler::assemble(const Eigen::VectorXd* u, bool with_diffusion,
                                     Execution exec) const {
  const Discretization& disc = *disc_;
  const Mesh& mesh = disc.mesh();
  const int d = disc.dim();
  const int nb = disc.num_local_nodes();
  const auto& table = disc.shapes();
  const std::size_t ncells = mesh.num_cells();
  std::vector<Eigen::MatrixXd> local(ncells);
  for_cells(ncells, exec, [&](std::size_t c) {
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(d + 1, d + 1);
    const auto& G = mesh.barycentric_gradients(c);
    if (with_diffusion) {
      const double vol = mesh.cell_volume(c);
      for (int i = 0; i <= d; ++i)
        for (int j = 0; j <= d; ++j) {
          const Vec gi = G.row(i).head(d).transpose();
          const Vec gj = G.row(j).head(d).transpose();
          A(i, j) += vol * gi.dot(K_ * gj);
        }
    }
    if (u) {
      const auto& nodes = disc.cell_nodes(c);
      for (std::size_t q = 0; q < table.rule.size(); ++q) {
        const double w = disc.quadrature_weight(c, q);
        Vec uq = Vec::Zero(d);
        for (int a = 0; a < nb; ++a)
          for (int k = 0; k < d; ++k) uq(k) += (*u)(nodes[a] * d + k) * table.p2_value[q][a];
        const Eigen::Vector4d& psi = table.rule.barycentric[q];
        for (int i = 0; i <= d; ++i)
          for (int j = 0; j <= d; ++j) {
            const double adv_j = uq.dot(G.row(j).head(d).transpose());
            const double adv_i = uq.dot(G.row(i).head(d).transpose());
            A(i, j) += 0.5 * w * (adv_j * psi(i) - adv_i * psi(j));
          }
      }
    }
    local[c] = std::move(A);
  });
  SparseMatrix M = plan_.zero_matrix();
  for (std::size_t c = 0; c < ncells; ++c) plan_.add(M, c, local[c]);
  return M;
}

SparseMatrix HeatAssembler::diffusion(Execution exec) const { return assemble(nullptr, true, exec); }

SparseMatrix HeatAssembler::convection(const Eigen::VectorXd& u, Execution exec) const {
  return assemble(&u, false, exec);
}

SparseMatrix HeatAssembler::matrix(const Eigen::VectorXd& u, Execution exec) const {
  return assemble(&u, true, exec);
}

HeatLoad assemble_heat_load(const Discretization& disc, const ViscosityModel& model, double p,
                            double delta, const Eigen::VectorXd& theta_prev,
                            const Eigen::VectorXd& u, const HeatSource& r,
                            const ScalarFn& theta_b, Execution exec) {
  if (!(delta > 0.0)) throw DomainError("regularization delta must be positive");
  const Mesh& mesh = disc.mesh();
  const int d = disc.dim();
  const int nb = disc.num_local_nodes();
  const auto& table = disc.shapes();
  const std::size_t ncells = mesh.num_cells();
  const auto dofs = temperature_cell_dofs(disc);

  std::vector<Eigen::VectorXd> local_g(ncells), local_r(ncells);
  for_cells(ncells, exec, [&](std::size_t c) {
    Eigen::VectorXd lg = Eigen::VectorXd::Zero(d + 1), lr = Eigen::VectorXd::Zero(d + 1);
    Eigen::Matrix<double, 10, 3> grads;
    const auto& nodes = disc.cell_nodes(c);
    for (std::size_t q = 0; q < table.rule.size(); ++q) {
      disc.p2_gradients(c, q, grads);
      const double w = disc.quadrature_weight(c, q);
      Mat Du = Mat::Zero(d, d);
      Vec uq = Vec::Zero(d);
      for (int a = 0; a < nb; ++a)
        for (int i = 0; i < d; ++i) {
          Du.row(i) += u(nodes[a] * d + i) * grads.row(a).head(d);
          uq(i) += u(nodes[a] * d + i) * table.p2_value[q][a];
        }
      const Eigen::Vector4d& psi = table.rule.barycentric[q];
      const double theta = theta_at(mesh, c, psi, theta_prev);
      const double g = eval_g_delta(model, p, theta, uq, sym(Du), delta);
      const double rv = r(theta);
      for (int i = 0; i <= d; ++i) {
        lg(i) += w * g * psi(i);
        lr(i) += w * rv * psi(i);
      }
    }
    local_g[c] = std::move(lg);
    local_r[c] = std::move(lr);
  });

  HeatLoad load;
  const int n = disc.num_temperature_free();
  load.dissipation = Eigen::VectorXd::Zero(n);
  load.source = Eigen::VectorXd::Zero(n);
  load.boundary = Eigen::VectorXd::Zero(n);
  for (std::size_t c = 0; c < ncells; ++c)
    for (int i = 0; i <= d; ++i) {
      const int idx = dofs[c][i];
      if (idx < 0) continue;
      load.dissipation(idx) += local_g[c](i);
      load.source(idx) += local_r[c](i);
    }

  const QuadratureRule frule = simplex_rule(d - 1, 4);
  const double fscale = factorial(d - 1);
  for (const auto& f : mesh.facets()) {
    if (f.tag != FacetTag::gamma0 || !theta_b) continue;
    for (std::size_t q = 0; q < frule.size(); ++q) {
      Vec x = Vec::Zero(d);
      for (int i = 0; i < d; ++i) x += frule.barycentric[q](i) * mesh.vertex(f.vertices[i]);
      const double value = eval_theta_b_delta(theta_b(x), delta);
      const double w = frule.weights[q] * f.measure * fscale;
      for (int i = 0; i < d; ++i) {
        const int idx = disc.temperature_free()[f.vertices[i]];
        if (idx >= 0) load.boundary(idx) += w * value * frule.barycentric[q](i);
      }
    }
  }
  return load;
}

HeatOperator assemble_heat(const HeatAssembler& heat, const ViscosityModel& model, double p,
                           double delta, const Eigen::VectorXd& theta_prev,
                           const Eigen::VectorXd& u, const HeatSource& r,
                           const ScalarFn& theta_b, Execution exec) {
  HeatOperator op;
  op.matrix = heat.matrix(u, exec);
  op.load = assemble_heat_load(heat.disc(), model, p, delta, theta_prev, u, r, theta_b, exec).total();
  return op;
}

}  // namespace tresca
