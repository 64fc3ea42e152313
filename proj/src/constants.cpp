#include "tresca/constants.hpp"

#include "tresca/assembly.hpp"
#include "tresca/parallel.hpp"

#include <Eigen/SparseCholesky>

#include <cmath>
#include <limits>
#include <random>

namespace tresca {

namespace {

// Local blocks in parallel, scatter in cell order.
template <class Local>
SparseMatrix assemble_cells(const Discretization& disc, const std::vector<std::vector<int>>& dofs,
                            int size, Local&& local) {
  const ScatterPlan plan(size, size, dofs, dofs);
  SparseMatrix out = plan.zero_matrix();
  const std::size_t ncells = disc.mesh().num_cells();
  std::vector<Eigen::MatrixXd> blocks(ncells);
  for_cells(ncells, Execution::parallel, [&](std::size_t c) { blocks[c] = local(c); });
  for (std::size_t c = 0; c < ncells; ++c) plan.add(out, c, blocks[c]);
  return out;
}

// ||x||_a^a style functionals and their gradients in the coefficients.
enum class VelocityPart { value, grad, strain };

double velocity_power(const Discretization& disc, const Eigen::VectorXd& free, VelocityPart part,
                      double a, Eigen::VectorXd* gradient) {
  const int d = disc.dim();
  const int nb = disc.num_local_nodes();
  const auto& table = disc.shapes();
  const auto& fidx = disc.velocity_free();
  const Eigen::VectorXd u = disc.extend_velocity(free);
  if (gradient) gradient->setZero(free.size());
  double total = 0.0;
  const double eps2 = 1e-30;
  Eigen::Matrix<double, 10, 3> grads;
  for (std::size_t c = 0; c < disc.mesh().num_cells(); ++c) {
    const auto& nodes = disc.cell_nodes(c);
    for (std::size_t q = 0; q < table.rule.size(); ++q) {
      disc.p2_gradients(c, q, grads);
      const double w = disc.quadrature_weight(c, q);
      Mat G = Mat::Zero(d, d);
      Vec val = Vec::Zero(d);
      for (int b = 0; b < nb; ++b)
        for (int i = 0; i < d; ++i) {
          G.row(i) += u(nodes[b] * d + i) * grads.row(b).head(d);
          val(i) += u(nodes[b] * d + i) * table.p2_value[q][b];
        }
      Mat X;
      double n2 = 0.0;
      if (part == VelocityPart::value) {
        n2 = val.squaredNorm();
      } else {
        X = part == VelocityPart::grad ? G : sym(G);
        n2 = X.squaredNorm();
      }
      total += w * std::pow(n2, 0.5 * a);
      if (!gradient) continue;
      const double coef = a * w * std::pow(n2 + eps2, 0.5 * a - 1.0);
      for (int b = 0; b < nb; ++b)
        for (int i = 0; i < d; ++i) {
          const int idx = fidx[nodes[b] * d + i];
          if (idx < 0) continue;
          double dphi = 0.0;
          if (part == VelocityPart::value) {
            dphi = val(i) * table.p2_value[q][b];
          } else {
            // X symmetric for the strain part, so X : sym(e_i g^T) = X_i . g
            dphi = X.row(i).dot(grads.row(b).head(d));
          }
          (*gradient)(idx) += coef * dphi;
        }
    }
  }
  return total;
}

double p1_power(const Discretization& disc, const Eigen::VectorXd& free, bool gradient_part,
                double a, Eigen::VectorXd* gradient) {
  const Mesh& mesh = disc.mesh();
  const int d = disc.dim();
  const auto& table = disc.shapes();
  const auto& fidx = disc.temperature_free();
  const Eigen::VectorXd t = disc.extend_temperature(free);
  if (gradient) gradient->setZero(free.size());
  double total = 0.0;
  const double eps2 = 1e-30;
  for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
    const auto& gl = mesh.barycentric_gradients(c);
    const auto& verts = mesh.cell(c);
    Vec g = Vec::Zero(d);
    for (int i = 0; i <= d; ++i) g += t(verts[i]) * gl.row(i).head(d).transpose();
    for (std::size_t q = 0; q < table.rule.size(); ++q) {
      const double w = disc.quadrature_weight(c, q);
      const Eigen::Vector4d& psi = table.rule.barycentric[q];
      double val = 0.0;
      for (int i = 0; i <= d; ++i) val += psi(i) * t(verts[i]);
      const double n2 = gradient_part ? g.squaredNorm() : val * val;
      total += w * std::pow(n2, 0.5 * a);
      if (!gradient) continue;
      const double coef = a * w * std::pow(n2 + eps2, 0.5 * a - 1.0);
      for (int i = 0; i <= d; ++i) {
        const int idx = fidx[verts[i]];
        if (idx < 0) continue;
        (*gradient)(idx) +=
            coef * (gradient_part ? g.dot(gl.row(i).head(d).transpose()) : val * psi(i));
      }
    }
  }
  return total;
}

// Extremizes (1/a) log N(x) - (1/b) log D(x), a scale-invariant log ratio,
// by normalized gradient steps with backtracking.
template <class Num, class Den>
double optimize_ratio(Num&& num, Den&& den, double a, double b, bool maximize,
                      std::vector<Eigen::VectorXd> starts, int steps) {
  const double sign = maximize ? 1.0 : -1.0;
  auto objective = [&](const Eigen::VectorXd& x, Eigen::VectorXd* g) {
    Eigen::VectorXd gn, gd;
    const double n = num(x, g ? &gn : nullptr);
    const double dd = den(x, g ? &gd : nullptr);
    if (!(n > 0.0) || !(dd > 0.0)) return -std::numeric_limits<double>::infinity();
    if (g) *g = sign * (gn / (a * n) - gd / (b * dd));
    return sign * (std::log(n) / a - std::log(dd) / b);
  };
  double best = -std::numeric_limits<double>::infinity();
  for (auto& x : starts) {
    x /= x.norm();
    Eigen::VectorXd g;
    double value = objective(x, &g);
    double t = 0.1;
    for (int it = 0; it < steps && std::isfinite(value); ++it) {
      const double gn = g.norm();
      if (gn == 0.0) break;
      bool moved = false;
      while (t > 1e-10) {
        Eigen::VectorXd y = x + t * g / gn;
        y /= y.norm();
        Eigen::VectorXd gy;
        const double vy = objective(y, &gy);
        if (vy > value) {
          x = std::move(y);
          g = std::move(gy);
          value = vy;
          moved = true;
          t = std::min(2.0 * t, 0.5);
          break;
        }
        t *= 0.5;
      }
      if (!moved) break;
    }
    best = std::max(best, value);
  }
  return std::exp(sign * best);
}

std::vector<Eigen::VectorXd> start_fields(const Eigen::VectorXd& seed_field, int random_starts,
                                          std::mt19937_64& rng) {
  std::vector<Eigen::VectorXd> out{seed_field};
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  for (int i = 0; i < random_starts; ++i) {
    Eigen::VectorXd r(seed_field.size());
    for (int j = 0; j < r.size(); ++j) r(j) = dist(rng);
    // random fields are smoothed by mixing with the extremal field
    out.push_back(seed_field / seed_field.norm() + 0.3 * r / r.norm());
  }
  return out;
}

}  // namespace

VelocityForms velocity_forms(const Discretization& disc) {
  const int d = disc.dim();
  const int nb = disc.num_local_nodes();
  const auto& table = disc.shapes();
  const auto dofs = velocity_cell_dofs(disc);
  const int n = disc.num_velocity_free();
  VelocityForms out;
  auto build = [&](int which) {
    return assemble_cells(disc, dofs, n, [&](std::size_t c) {
      Eigen::MatrixXd local = Eigen::MatrixXd::Zero(nb * d, nb * d);
      Eigen::Matrix<double, 10, 3> grads;
      for (std::size_t q = 0; q < table.rule.size(); ++q) {
        disc.p2_gradients(c, q, grads);
        const double w = disc.quadrature_weight(c, q);
        for (int a = 0; a < nb; ++a)
          for (int b = 0; b < nb; ++b) {
            const double gg = grads.row(a).head(d).dot(grads.row(b).head(d));
            const double vv = table.p2_value[q][a] * table.p2_value[q][b];
            for (int i = 0; i < d; ++i)
              for (int j = 0; j < d; ++j) {
                double v = 0.0;
                if (which == 0) {
                  v = i == j ? gg : 0.0;
                } else if (which == 1) {
                  // D(phi_a e_i) : D(phi_b e_j)
                  v = 0.5 * ((i == j ? gg : 0.0) + grads(a, j) * grads(b, i));
                } else {
                  v = i == j ? vv : 0.0;
                }
                local(a * d + i, b * d + j) += w * v;
              }
          }
      }
      return local;
    });
  };
  out.grad = build(0);
  out.strain = build(1);
  out.mass = build(2);
  return out;
}

TemperatureForms temperature_forms(const Discretization& disc) {
  const Mesh& mesh = disc.mesh();
  const int d = disc.dim();
  const auto& table = disc.shapes();
  const auto dofs = temperature_cell_dofs(disc);
  const int n = disc.num_temperature_free();
  TemperatureForms out;
  out.stiffness = assemble_cells(disc, dofs, n, [&](std::size_t c) {
    const auto& gl = mesh.barycentric_gradients(c);
    Eigen::MatrixXd local(d + 1, d + 1);
    for (int i = 0; i <= d; ++i)
      for (int j = 0; j <= d; ++j)
        local(i, j) = mesh.cell_volume(c) * gl.row(i).head(d).dot(gl.row(j).head(d));
    return local;
  });
  out.mass = assemble_cells(disc, dofs, n, [&](std::size_t c) {
    Eigen::MatrixXd local = Eigen::MatrixXd::Zero(d + 1, d + 1);
    for (std::size_t q = 0; q < table.rule.size(); ++q) {
      const Eigen::Vector4d& psi = table.rule.barycentric[q];
      local += disc.quadrature_weight(c, q) * psi.head(d + 1) * psi.head(d + 1).transpose();
    }
    return local;
  });
  const QuadratureRule frule = simplex_rule(d - 1, 4);
  const double fscale = d == 3 ? 2.0 : 1.0;
  std::vector<Eigen::Triplet<double>> t;
  for (const auto& f : mesh.facets()) {
    if (f.tag != FacetTag::gamma0) continue;
    for (std::size_t q = 0; q < frule.size(); ++q) {
      const double w = frule.weights[q] * f.measure * fscale;
      for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
          const int a = disc.temperature_free()[f.vertices[i]];
          const int b = disc.temperature_free()[f.vertices[j]];
          if (a >= 0 && b >= 0)
            t.emplace_back(a, b, w * frule.barycentric[q](i) * frule.barycentric[q](j));
        }
    }
  }
  out.gamma0.resize(n, n);
  out.gamma0.setFromTriplets(t.begin(), t.end());
  return out;
}

GeneralizedEigen largest_generalized_eigenvalue(const SparseMatrix& B, const SparseMatrix& A,
                                                std::uint64_t seed, double tol,
                                                int max_iterations) {
  const int n = static_cast<int>(A.rows());
  if (n == 0) throw SolverError("empty eigenproblem");
  Eigen::SimplicialLDLT<SparseMatrix> ldlt(A);
  if (ldlt.info() != Eigen::Success) throw SolverError("eigenproblem: A is not positive definite");
  const int block = std::min(n, 8);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Eigen::MatrixXd X(n, block);
  for (int j = 0; j < block; ++j)
    for (int i = 0; i < n; ++i) X(i, j) = dist(rng);
  GeneralizedEigen out;
  double previous = 0.0;
  for (int it = 1; it <= max_iterations; ++it) {
    // the first pass only orthonormalizes the random block
    const Eigen::MatrixXd Z = it == 1 ? X : Eigen::MatrixXd(ldlt.solve(B * X));
    if (ldlt.info() != Eigen::Success) throw SolverError("eigenproblem: solve failed");
    // orthonormal basis: the block turns rank deficient once rank(B) < block
    const Eigen::MatrixXd Y = Eigen::HouseholderQR<Eigen::MatrixXd>(Z).householderQ() *
                              Eigen::MatrixXd::Identity(n, block);
    const Eigen::MatrixXd Ar = Y.transpose() * (A * Y);
    const Eigen::MatrixXd Br = Y.transpose() * (B * Y);
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> ritz(0.5 * (Br + Br.transpose()),
                                                                   0.5 * (Ar + Ar.transpose()));
    if (ritz.info() != Eigen::Success) throw SolverError("eigenproblem: Ritz step failed");
    // eigenvalues ascending; keep the block ordered largest first
    X = (Y * ritz.eigenvectors()).rowwise().reverse();
    const double value = ritz.eigenvalues()(block - 1);
    out.value = value;
    out.iterations = it;
    if (it > 2 && std::abs(value - previous) <= tol * std::abs(value)) break;
    if (it == max_iterations) throw SolverError("eigenproblem: subspace iteration did not converge");
    previous = value;
  }
  out.vector = X.col(0);
  return out;
}

EstimateConstants estimate_constants(const Discretization& disc, double p, double q,
                                     const ConstantsOptions& options) {
  EstimateConstants c;
  c.p = p;
  c.q = q;
  c.omega_measure = disc.mesh().omega_measure();
  c.gamma0_measure = disc.mesh().boundary_measure(FacetTag::gamma0);
  c.certified = false;

  const VelocityForms vf = velocity_forms(disc);
  const GeneralizedEigen korn = largest_generalized_eigenvalue(vf.grad, vf.strain, options.seed);
  const GeneralizedEigen poinc = largest_generalized_eigenvalue(vf.mass, vf.grad, options.seed + 1);
  c.korn = 1.0 / std::sqrt(korn.value);
  c.poincare_p = std::sqrt(poinc.value);

  const TemperatureForms tf = temperature_forms(disc);
  const GeneralizedEigen p2 = largest_generalized_eigenvalue(tf.mass, tf.stiffness, options.seed + 2);
  const GeneralizedEigen tr = largest_generalized_eigenvalue(tf.gamma0, tf.stiffness, options.seed + 3);
  c.poincare_2 = std::sqrt(p2.value);
  c.trace = std::sqrt(tr.value);

  std::mt19937_64 rng(options.seed + 4);
  if (p != 2.0) {
    auto strain = [&](const Eigen::VectorXd& x, Eigen::VectorXd* g) {
      return velocity_power(disc, x, VelocityPart::strain, p, g);
    };
    auto grad = [&](const Eigen::VectorXd& x, Eigen::VectorXd* g) {
      return velocity_power(disc, x, VelocityPart::grad, p, g);
    };
    auto value = [&](const Eigen::VectorXd& x, Eigen::VectorXd* g) {
      return velocity_power(disc, x, VelocityPart::value, p, g);
    };
    c.korn = optimize_ratio(strain, grad, p, p, false,
                            start_fields(korn.vector, options.random_starts, rng),
                            options.descent_steps);
    c.poincare_p = optimize_ratio(value, grad, p, p, true,
                                  start_fields(poinc.vector, options.random_starts, rng),
                                  options.descent_steps);
  }
  const double q_star = 3.0 * q / (3.0 - q);
  auto t_value = [&](const Eigen::VectorXd& x, Eigen::VectorXd* g) {
    return p1_power(disc, x, false, q_star, g);
  };
  auto t_grad = [&](const Eigen::VectorXd& x, Eigen::VectorXd* g) {
    return p1_power(disc, x, true, q, g);
  };
  c.embedding_q = optimize_ratio(t_value, t_grad, q_star, q, true,
                                 start_fields(p2.vector, options.random_starts, rng),
                                 options.descent_steps);
  for (double v : {c.korn, c.poincare_p, c.poincare_2, c.trace, c.embedding_q})
    if (!(v > 0.0) || !std::isfinite(v)) throw SolverError("constant estimate is not positive");
  return c;
}

EstimateConstants with_data(EstimateConstants c, const ProblemConfig& config) {
  c.mu0 = config.viscosity.mu0();
  c.mu1 = config.viscosity.mu1();
  c.k0 = config.k0;
  return c;
}

FlowDataNorms flow_data_norms(const Discretization& disc, const ProblemConfig& config) {
  FlowDataNorms n;
  const double p = config.p;
  const double pp = p / (p - 1.0);
  const VectorFn f = config.f_fn();
  double fsum = 0.0;
  for (std::size_t c = 0; c < disc.mesh().num_cells(); ++c)
    for (std::size_t q = 0; q < disc.shapes().rule.size(); ++q)
      fsum += disc.quadrature_weight(c, q) * std::pow(f(disc.quadrature_point(c, q)).norm(), pp);
  n.f_norm = std::pow(fsum, 1.0 / pp);
  const Eigen::VectorXd G = interpolate_velocity(disc, config.G_fn());
  n.G_norm = velocity_full_w1p(disc, G, p);
  n.DG_norm = strain_lp(disc, G, p);
  const ScalarFn k = config.k_fn();
  const VectorFn s = config.s_fn();
  const int d = disc.dim();
  for (const auto& fp : disc.friction_points()) {
    Vec diff = Vec::Zero(d);
    const Vec sv = s(fp.x);
    for (int j = 0; j < d - 1; ++j) diff(j) = G(fp.node * d + j) - sv(j);
    n.psi_zero += fp.weight * k(fp.x) * diff.norm();
  }
  return n;
}

}  // namespace tresca
