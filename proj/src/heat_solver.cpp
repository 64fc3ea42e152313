#include "tresca/heat_solver.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace tresca {

HeatData heat_data(const ProblemConfig& config) {
  HeatData data;
  data.model = config.viscosity;
  data.p = config.p;
  data.q = config.q;
  data.K = config.K;
  data.k0 = config.k0;
  data.r = config.r;
  data.theta_b = config.theta_b_fn();
  data.settings = config.solver;
  return data;
}

HeatState zero_heat_state(const Discretization& disc, double delta) {
  HeatState st;
  st.theta = Eigen::VectorXd::Zero(disc.num_vertices());
  st.delta = delta;
  return st;
}

HeatSolver::HeatSolver(const Discretization& disc, HeatData data)
    : disc_(&disc), data_(std::move(data)), assembler_(disc, data_.K) {
  set_velocity(Eigen::VectorXd::Zero(disc.velocity_size()), Execution::serial);
}

void HeatSolver::set_velocity(const Eigen::VectorXd& u, Execution exec) {
  u_ = u;
  matrix_ = assembler_.matrix(u, exec);
  lu_ = std::make_shared<Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>>>();
  lu_->compute(matrix_);
  if (lu_->info() != Eigen::Success) throw SolverError("heat matrix factorization failed");
}

Eigen::VectorXd HeatSolver::solve_free(const Eigen::VectorXd& load, double* residual) const {
  if (!lu_) throw SolverError("heat solver has no velocity set");
  Eigen::VectorXd x = lu_->solve(load);
  const double scale = std::max(load.norm(), 1e-300);
  double rel = (load - matrix_ * x).norm() / scale;
  for (int pass = 0; pass < 3 && rel > data_.settings.tol_heat; ++pass) {
    x += lu_->solve(load - matrix_ * x);
    rel = (load - matrix_ * x).norm() / scale;
  }
  if (load.norm() == 0.0) rel = 0.0;
  if (!std::isfinite(rel) || rel > std::max(data_.settings.tol_heat, 1e-10))
    throw SolverError("heat linear solve stalled at relative residual " + std::to_string(rel));
  if (residual) *residual = rel;
  return x;
}

HeatState HeatSolver::solve(const Eigen::VectorXd& theta_prev, double delta, Execution exec) const {
  HeatState st;
  st.delta = delta;
  st.load = assemble_heat_load(*disc_, data_.model, data_.p, delta, theta_prev, u_, data_.r,
                               data_.theta_b, exec);
  st.theta = disc_->extend_temperature(solve_free(st.load.total(), &st.linear_residual));
  st.norm_12 = temperature_w1q(*disc_, st.theta, 2.0);
  st.norm_1q = temperature_w1q(*disc_, st.theta, data_.q);
  return st;
}

HeatState solve_heat_linear(const Discretization& disc, const HeatData& data,
                            const Eigen::VectorXd& u, const Eigen::VectorXd& theta_prev,
                            double delta, Execution exec) {
  HeatSolver solver(disc, data);
  solver.set_velocity(u, exec);
  return solver.solve(theta_prev, delta, exec);
}

RegularizationReport verify_regularization_bounds(const Discretization& disc, const HeatData& data,
                                                  const Eigen::VectorXd& theta_prev,
                                                  const Eigen::VectorXd& u, double delta) {
  if (!(delta > 0.0)) throw DomainError("regularization delta must be positive");
  RegularizationReport rep;
  rep.delta = delta;
  rep.bound_inf = 1.0 / delta;
  const Mesh& mesh = disc.mesh();
  const int d = disc.dim();
  Vec worst_x;
  double worst = -1.0;
  bool negative = false;
  for_each_velocity_sample(disc, u, [&](const VelocitySample& s) {
    const Eigen::Vector4d bary = mesh.barycentric(s.cell, s.x);
    double th = 0.0;
    for (int i = 0; i <= d; ++i) th += bary(i) * theta_prev(mesh.cell(s.cell)[i]);
    const SymTensor D = sym(s.grad);
    const double g = eval_g_delta(data.model, data.p, th, s.value, D, delta);
    if (g < 0.0) negative = true;
    if (g > worst) {
      worst = g;
      worst_x = s.x;
    }
    rep.g_inf = std::max(rep.g_inf, std::abs(g));
    rep.g_l1 += s.weight * std::abs(g);
    rep.bound_l1 += s.weight * 2.0 * data.model.mu1() * std::pow(frobenius(D), data.p);
  });
  const double tol = 1e-10;
  auto where = [&] {
    std::ostringstream os;
    os << " at x = (";
    for (int i = 0; i < worst_x.size(); ++i) os << (i ? ", " : "") << worst_x(i);
    os << ")";
    return os.str();
  };
  if (negative) {
    rep.passed = false;
    throw InvariantViolation("g_delta negative");
  }
  if (rep.g_inf > rep.bound_inf * (1.0 + tol)) {
    rep.passed = false;
    throw InvariantViolation("g_delta = " + std::to_string(rep.g_inf) + " exceeds 1/delta" + where());
  }
  if (rep.g_l1 > rep.bound_l1 * (1.0 + tol) + 1e-300) {
    rep.passed = false;
    throw InvariantViolation("||g_delta||_1 = " + std::to_string(rep.g_l1) +
                             " exceeds 2 mu1 ||D(u)||_p^p = " + std::to_string(rep.bound_l1));
  }
  return rep;
}

double gamma0_l1(const Discretization& disc, const ScalarFn& fn) {
  if (!fn) return 0.0;
  const Mesh& mesh = disc.mesh();
  const int d = disc.dim();
  const QuadratureRule rule = simplex_rule(d - 1, 4);
  const double fscale = d == 3 ? 2.0 : 1.0;
  double total = 0.0;
  for (const auto& f : mesh.facets()) {
    if (f.tag != FacetTag::gamma0) continue;
    for (std::size_t q = 0; q < rule.size(); ++q) {
      Vec x = Vec::Zero(d);
      for (int i = 0; i < d; ++i) x += rule.barycentric[q](i) * mesh.vertex(f.vertices[i]);
      total += rule.weights[q] * f.measure * fscale * std::abs(fn(x));
    }
  }
  return total;
}

double heat_energy_term(const Discretization& disc, const HeatData& data, const Eigen::VectorXd& u) {
  const double dp = strain_lp(disc, u, data.p);
  return 2.0 * data.model.mu1() * std::pow(dp, data.p) +
         disc.mesh().omega_measure() * data.r.sup() + gamma0_l1(disc, data.theta_b);
}

double truncation_energy(const Discretization& disc, const Eigen::VectorXd& theta, double zeta) {
  double total = 0.0;
  for_each_p1_sample(disc, theta, [&](const ScalarSample& s) {
    total += s.weight * s.grad.squaredNorm() / std::pow(1.0 + std::abs(s.value), zeta + 1.0);
  });
  return total;
}

UniformBoundReport uniform_w1q_check(const HeatSolver& solver, const Eigen::VectorXd& theta_prev,
                                     const std::vector<double>& deltas,
                                     const EstimateConstants& constants, Execution exec) {
  if (deltas.empty()) throw DomainError("uniform bound check needs at least one delta");
  const auto [lo, hi] = std::minmax_element(deltas.begin(), deltas.end());
  if (*hi / *lo < 1e3 * (1.0 - 1e-12))
    throw DomainError("delta list must span at least 3 decades");
  const Discretization& disc = solver.disc();
  const HeatData& data = solver.data();
  const TruncationExponents ex = truncation_exponents(data.q);
  UniformBoundReport rep;
  rep.deltas = deltas;
  rep.energy_term = heat_energy_term(disc, data, solver.velocity());
  rep.heat_bound = c_heat_bound(constants, data.q, rep.energy_term).bound;
  for (double delta : deltas) {
    const HeatState st = solver.solve(theta_prev, delta, exec);
    rep.norms_1q.push_back(st.norm_1q);
    rep.norms_12.push_back(st.norm_12);
    const double rd = r_delta_bound(constants, delta, data.r.sup());
    rep.r_delta.push_back(rd);
    rep.truncation_energy.push_back(truncation_energy(disc, st.theta, ex.zeta));
    if (st.norm_12 > rd) rep.r_delta_ok = false;
    if (st.norm_1q > rep.heat_bound) rep.bound_ok = false;
  }
  const auto [nmin, nmax] = std::minmax_element(rep.norms_1q.begin(), rep.norms_1q.end());
  rep.ratio = *nmax == 0.0 ? 1.0 : *nmax / *nmin;
  rep.ratio_ok = rep.ratio <= 1.2;
  rep.passed = rep.ratio_ok && rep.bound_ok && rep.r_delta_ok;
  return rep;
}

}  // namespace tresca
