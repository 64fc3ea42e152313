#include "tresca/flow_solver.hpp"

#include <Eigen/SparseLU>

#include <cmath>
#include <limits>

namespace tresca {

namespace {

Vec zero_tangent(int d) { return Vec::Zero(d); }

// Residual and Jacobian of the velocity-pressure system at a fixed
// augmented-Lagrangian state (lambda_n, rho). Unknowns x = [v_free, pi, l].
class InnerSystem {
 public:
  InnerSystem(const FlowProblem& problem, const FlowAssembler& assembler,
              const Eigen::VectorXd& theta, const Eigen::VectorXd& u_frozen,
              const std::vector<Vec>& lambda_n, double rho, Execution exec)
      : P_(problem), A_(assembler), theta_(theta), u_frozen_(u_frozen), lambda_n_(lambda_n),
        rho_(rho), exec_(exec) {}

  int nv() const { return P_.disc().num_velocity_free(); }
  int np() const { return P_.disc().num_vertices(); }
  int size() const { return nv() + np() + 1; }

  Eigen::VectorXd residual(const Eigen::VectorXd& x, SparseMatrix* saddle,
                           std::vector<Vec>* lambda_out) const {
    const Discretization& disc = P_.disc();
    const int d = disc.dim();
    const int nv = this->nv(), np = this->np();
    const Eigen::VectorXd v = disc.extend_velocity(x.head(nv));
    const Eigen::VectorXd u = P_.total_velocity(v);
    const Eigen::VectorXd pi = x.segment(nv, np);
    const double ell = x(nv + np);

    FlowOperator op = A_.evaluate(theta_, u_frozen_, u, P_.load(), exec_, saddle != nullptr);
    Eigen::VectorXd F(size());
    F.head(nv) = op.residual - P_.B().transpose() * pi;

    const auto& points = disc.friction_points();
    const auto& free = disc.velocity_free();
    if (lambda_out) lambda_out->assign(points.size(), zero_tangent(d));
    for (std::size_t i = 0; i < points.size(); ++i) {
      const int node = points[i].node;
      Vec z = zero_tangent(d);
      for (int j = 0; j < d - 1; ++j) z(j) = u(node * d + j) - P_.s()[i](j);
      const double k = P_.k()[i];
      if (free[node * d] < 0) {
        // velocity prescribed here: no equation to enforce, take the slip branch
        const double nz = z.norm();
        if (lambda_out && nz > P_.stick_tolerance()) (*lambda_out)[i] = -k / nz * z;
        continue;
      }
      const Vec y = lambda_n_[i] - rho_ * z;
      const double ny = y.norm();
      const Vec lam = ny <= k ? y : Vec(y * (k / ny));
      if (lambda_out) (*lambda_out)[i] = lam;
      const double w = points[i].weight;
      for (int j = 0; j < d - 1; ++j) {
        const int idx = free[node * d + j];
        if (idx >= 0) F(idx) -= w * lam(j);
      }
      if (!saddle) continue;
      // d lambda / d u_tau = -rho M, M = I inside the ball, (k/|y|)(I - yy^T/|y|^2) outside
      Mat M = Mat::Identity(d - 1, d - 1);
      if (ny > k) {
        const Vec yh = y.head(d - 1) / ny;
        M = (k / ny) * (Mat::Identity(d - 1, d - 1) - yh * yh.transpose());
      }
      for (int a = 0; a < d - 1; ++a) {
        const int ia = free[node * d + a];
        if (ia < 0) continue;
        for (int b = 0; b < d - 1; ++b) {
          const int ib = free[node * d + b];
          if (ib >= 0 && M(a, b) != 0.0) op.jacobian.coeffRef(ia, ib) += w * rho_ * M(a, b);
        }
      }
    }

    F.segment(nv, np) = -(P_.B() * x.head(nv) + P_.divergence_of_G()) - P_.mass() * ell;
    F(nv + np) = -P_.mass().dot(pi);

    if (saddle) {
      std::vector<Eigen::Triplet<double>> t;
      t.reserve(op.jacobian.nonZeros() + 2 * P_.B().nonZeros() + 2 * np);
      for (int c = 0; c < op.jacobian.outerSize(); ++c)
        for (SparseMatrix::InnerIterator it(op.jacobian, c); it; ++it)
          t.emplace_back(it.row(), it.col(), it.value());
      for (int c = 0; c < P_.B().outerSize(); ++c)
        for (SparseMatrix::InnerIterator it(P_.B(), c); it; ++it) {
          t.emplace_back(it.col(), nv + it.row(), -it.value());
          t.emplace_back(nv + it.row(), it.col(), -it.value());
        }
      for (int j = 0; j < np; ++j) {
        t.emplace_back(nv + j, nv + np, -P_.mass()(j));
        t.emplace_back(nv + np, nv + j, -P_.mass()(j));
      }
      saddle->resize(size(), size());
      saddle->setFromTriplets(t.begin(), t.end());
      saddle->makeCompressed();
    }
    return F;
  }

 private:
  const FlowProblem& P_;
  const FlowAssembler& A_;
  const Eigen::VectorXd& theta_;
  const Eigen::VectorXd& u_frozen_;
  const std::vector<Vec>& lambda_n_;
  double rho_;
  Execution exec_;
};

struct InnerResult {
  int iterations = 0;
  double residual = 0.0;
  double scale = 0.0;
};

InnerResult newton_solve(const InnerSystem& sys, const SolverSettings& settings,
                         Eigen::VectorXd& x, std::vector<Vec>& lambda) {
  InnerResult out;
  out.scale = sys.residual(Eigen::VectorXd::Zero(sys.size()), nullptr, nullptr).norm();
  const double target = settings.tol_flow * out.scale;
  SparseMatrix K;
  Eigen::VectorXd F = sys.residual(x, &K, &lambda);
  double norm = F.norm();
  Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>> lu;
  bool analyzed = false;
  std::vector<double> history{norm};
  while (norm > target) {
    if (out.iterations >= settings.max_newton)
      throw SolverError("flow Newton did not converge in " + std::to_string(settings.max_newton) +
                            " iterations",
                        history);
    if (!analyzed) {
      lu.analyzePattern(K);
      analyzed = true;
    }
    lu.factorize(K);
    if (lu.info() != Eigen::Success) throw SolverError("flow saddle system is singular", history);
    const Eigen::VectorXd dx = lu.solve(-F);
    double alpha = 1.0;
    int halvings = 0;
    Eigen::VectorXd x_try = x + dx;
    Eigen::VectorXd F_try = sys.residual(x_try, nullptr, nullptr);
    while (F_try.norm() > (1.0 - 1e-4 * alpha) * norm && halvings < 30) {
      alpha *= 0.5;
      ++halvings;
      x_try = x + alpha * dx;
      F_try = sys.residual(x_try, nullptr, nullptr);
    }
    ++out.iterations;
    if (F_try.norm() >= norm) {
      // no decrease possible: accept only if already at rounding level
      if (norm <= 1e-10 * std::max(out.scale, 1e-300) ) break;
      throw SolverError("flow line search failed after 30 halvings", history);
    }
    x = x_try;
    F = sys.residual(x, &K, &lambda);
    norm = F.norm();
    history.push_back(norm);
  }
  out.residual = norm;
  return out;
}

struct AlmRun {
  Eigen::VectorXd x;
  std::vector<Vec> lambda;
  FlowDiagnostics diag;
};

AlmRun run_alm(const FlowProblem& problem, const FlowAssembler& assembler,
               const Eigen::VectorXd& theta, const Eigen::VectorXd& u_frozen, AlmRun start,
               Execution exec) {
  const SolverSettings& settings = problem.data().settings;
  const int d = problem.disc().dim();
  double rho = problem.rho0();
  double previous = std::numeric_limits<double>::infinity();
  AlmRun run = std::move(start);
  run.diag = FlowDiagnostics{};
  for (int it = 0;; ++it) {
    if (it >= settings.max_uzawa)
      throw SolverError("friction multiplier stagnated after " + std::to_string(it) +
                            " augmented-Lagrangian updates",
                        run.diag.uzawa_history);
    const InnerSystem sys(problem, assembler, theta, u_frozen, run.lambda, rho, exec);
    std::vector<Vec> lambda_new;
    const InnerResult inner = newton_solve(sys, settings, run.x, lambda_new);
    run.diag.newton_iterations += inner.iterations;
    run.diag.residual = inner.residual;
    run.diag.residual_scale = inner.scale;
    double change = 0.0, largest = 1.0;
    const auto& points = problem.disc().friction_points();
    const auto& free = problem.disc().velocity_free();
    for (std::size_t i = 0; i < lambda_new.size(); ++i) {
      if (free[points[i].node * d] < 0) continue;
      change = std::max(change, (lambda_new[i] - run.lambda[i]).norm());
      largest = std::max(largest, lambda_new[i].head(d - 1).norm());
    }
    run.lambda = std::move(lambda_new);
    run.diag.uzawa_history.push_back(change);
    run.diag.uzawa_iterations = it + 1;
    run.diag.multiplier_change = change;
    run.diag.rho = rho;
    if (change <= settings.tol_uzawa * largest) break;
    if (change >= previous) rho = std::max(0.5 * rho, 1e-6 * problem.rho0());
    previous = change;
  }
  return run;
}

}  // namespace

FlowData flow_data(const ProblemConfig& config) {
  FlowData data;
  data.model = config.viscosity;
  data.p = config.p;
  data.f = config.f_fn();
  data.G = config.G_fn();
  data.s = config.s_fn();
  data.k = config.k_fn();
  data.settings = config.solver;
  return data;
}

FlowProblem::FlowProblem(const Discretization& disc, FlowData data)
    : disc_(&disc),
      data_(std::move(data)),
      assembler_(disc, data_.model, data_.p, 0.0) {
  const int d = disc.dim();
  const VectorFn zero = [d](const Vec&) { return Vec(Vec::Zero(d)); };
  G_ = interpolate_velocity(disc, data_.G ? data_.G : zero);
  load_ = data_.f ? assemble_velocity_load(disc, data_.f)
                  : Eigen::VectorXd(Eigen::VectorXd::Zero(disc.num_velocity_free()));
  for (const auto& fp : disc.friction_points()) {
    k_.push_back(data_.k ? data_.k(fp.x) : 0.0);
    Vec sv = data_.s ? data_.s(fp.x) : Vec(Vec::Zero(d));
    sv(d - 1) = 0.0;
    s_.push_back(sv);
  }
  velocity_scale_ = 1.0;
  if (G_.size() > 0) velocity_scale_ = std::max(velocity_scale_, G_.cwiseAbs().maxCoeff());
  double s_max = 0.0;
  for (const auto& sv : s_) s_max = std::max(s_max, sv.norm());
  velocity_scale_ = std::max(velocity_scale_, s_max);
  stick_tolerance_ = 1e-6 * std::max(1.0, s_max);
  const double eps = data_.settings.eps_reg * velocity_scale_;
  assembler_ = FlowAssembler(disc, data_.model, data_.p, eps);
  if (data_.p != 2.0) linear_.emplace(disc, data_.model, 2.0, eps);
  B_ = divergence_matrix(disc);
  mass_ = p1_mass_vector(disc);
  div_G_ = assemble_divergence(disc, G_);
  rho0_ = data_.settings.rho_factor * 2.0 * data_.model.mu1() / disc.mesh().min_cell_diameter();
}

std::vector<Vec> FlowProblem::slip(const Eigen::VectorXd& v) const {
  const int d = disc_->dim();
  std::vector<Vec> out;
  for (std::size_t i = 0; i < s_.size(); ++i) {
    const int node = disc_->friction_points()[i].node;
    Vec z = Vec::Zero(d);
    for (int j = 0; j < d - 1; ++j) z(j) = v(node * d + j) + G_(node * d + j) - s_[i](j);
    out.push_back(z);
  }
  return out;
}

FlowState zero_flow_state(const FlowProblem& problem) {
  const Discretization& disc = problem.disc();
  FlowState st;
  st.velocity = Eigen::VectorXd::Zero(disc.velocity_size());
  st.pressure = Eigen::VectorXd::Zero(disc.num_vertices());
  st.lambda.assign(disc.friction_points().size(), Vec::Zero(disc.dim()));
  return st;
}

FlowState solve_flow_vi(const FlowProblem& problem, const Eigen::VectorXd& theta_frozen,
                        const Eigen::VectorXd& u_frozen, const FlowState* warm_start,
                        Execution exec) {
  const Discretization& disc = problem.disc();
  const int nv = disc.num_velocity_free(), np = disc.num_vertices();
  if (theta_frozen.size() != np || u_frozen.size() != disc.velocity_size())
    throw DomainError("frozen fields do not match the discretization");

  auto pack = [&](const FlowState& st) {
    AlmRun run;
    run.x.resize(nv + np + 1);
    run.x.head(nv) = disc.restrict_velocity(st.velocity);
    run.x.segment(nv, np) = st.pressure;
    run.x(nv + np) = st.mean_multiplier;
    run.lambda = st.lambda;
    return run;
  };

  AlmRun start = pack(warm_start ? *warm_start : zero_flow_state(problem));
  if (!warm_start && problem.data().p != 2.0)
    start = run_alm(problem, problem.linear_assembler(), theta_frozen, u_frozen, std::move(start), exec);
  AlmRun run = run_alm(problem, problem.assembler(), theta_frozen, u_frozen, std::move(start), exec);

  FlowState st;
  st.velocity = disc.extend_velocity(run.x.head(nv));
  st.pressure = run.x.segment(nv, np);
  st.mean_multiplier = run.x(nv + np);
  st.lambda = std::move(run.lambda);
  st.diag = std::move(run.diag);
  st.diag.divergence_residual = (problem.B() * run.x.head(nv) + problem.divergence_of_G()).norm();
  st.diag.velocity_norm = velocity_w1p(disc, st.velocity, problem.data().p);
  return st;
}

Vec uzawa_project(const Vec& lambda_trial, double k) {
  if (!(k >= 0.0)) throw DomainError("friction threshold must be nonnegative");
  const double n = lambda_trial.norm();
  if (n <= k) return lambda_trial;
  return lambda_trial * (k / n);
}

Eigen::VectorXd momentum_residual(const FlowProblem& problem, const FlowState& state,
                                  const Eigen::VectorXd& theta_frozen,
                                  const Eigen::VectorXd& u_frozen, Execution exec) {
  const Eigen::VectorXd u = problem.total_velocity(state.velocity);
  Eigen::VectorXd r =
      problem.assembler().evaluate(theta_frozen, u_frozen, u, problem.load(), exec, false).residual;
  r -= assemble_friction(problem.disc(), state.lambda, problem.k());
  r -= problem.B().transpose() * state.pressure;
  return r;
}

Eigen::VectorXd recover_pressure(const FlowProblem& problem, const FlowState& state,
                                 const Eigen::VectorXd& theta_frozen,
                                 const Eigen::VectorXd& u_frozen, Execution exec) {
  FlowState no_pressure = state;
  no_pressure.pressure.setZero();
  const Eigen::VectorXd r = momentum_residual(problem, no_pressure, theta_frozen, u_frozen, exec);
  const SparseMatrix& B = problem.B();
  const Eigen::VectorXd& m = problem.mass();
  const int n = static_cast<int>(m.size());
  // bordered system [B B^T, m; m^T, 0] keeps the zero-mean constraint sparse
  const SparseMatrix N = B * SparseMatrix(B.transpose());
  std::vector<Eigen::Triplet<double>> t;
  for (int c = 0; c < N.outerSize(); ++c)
    for (SparseMatrix::InnerIterator it(N, c); it; ++it) t.emplace_back(it.row(), it.col(), it.value());
  for (int i = 0; i < n; ++i) {
    t.emplace_back(i, n, m(i));
    t.emplace_back(n, i, m(i));
  }
  SparseMatrix A(n + 1, n + 1);
  A.setFromTriplets(t.begin(), t.end());
  Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>> lu(A);
  if (lu.info() != Eigen::Success) throw SolverError("pressure normal equations are singular");
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n + 1);
  rhs.head(n) = B * r;
  const Eigen::VectorXd sol = lu.solve(rhs);
  if (lu.info() != Eigen::Success) throw SolverError("pressure recovery failed");
  return sol.head(n);
}

Traction compute_traction(const SymTensor& sigma, const Vec& n) {
  if (std::abs(n.norm() - 1.0) > 1e-12) throw DomainError("traction needs a unit normal");
  Traction t;
  const Vec sn = sigma * n;
  t.sigma_n = n.dot(sn);
  t.sigma_tau = sn - t.sigma_n * n;
  return t;
}

SymTensor gamma0_stress(const FlowProblem& problem, const FlowState& state,
                        const Eigen::VectorXd& theta, std::size_t point) {
  const Discretization& disc = problem.disc();
  const Mesh& mesh = disc.mesh();
  const int d = disc.dim();
  const auto& fp = disc.friction_points()[point];
  const std::size_t cell = mesh.facets()[fp.facet].cell;
  QuadratureRule one;
  one.dim = d;
  one.barycentric = {mesh.barycentric(cell, fp.x)};
  one.weights = {1.0};
  const ShapeTable table = make_shape_table(d, one);
  const auto& G = mesh.barycentric_gradients(cell);
  const auto& nodes = disc.cell_nodes(cell);
  const Eigen::VectorXd u = problem.total_velocity(state.velocity);
  Mat Du = Mat::Zero(d, d);
  Vec uv = Vec::Zero(d);
  for (int a = 0; a < table.num_p2; ++a) {
    const Vec ga = (table.p2_dlambda[0][a].transpose() * G).head(d).transpose();
    for (int i = 0; i < d; ++i) {
      Du.row(i) += u(nodes[a] * d + i) * ga.transpose();
      uv(i) += u(nodes[a] * d + i) * table.p2_value[0][a];
    }
  }
  double th = 0.0, pi = 0.0;
  for (int i = 0; i <= d; ++i) {
    th += one.barycentric[0](i) * theta(mesh.cell(cell)[i]);
    pi += one.barycentric[0](i) * state.pressure(mesh.cell(cell)[i]);
  }
  SymTensor sigma = eval_F(problem.data().model, problem.data().p, th, uv, sym(Du));
  sigma.diagonal().array() -= pi;
  return sigma;
}

ComplementarityReport check_complementarity(const FlowProblem& problem, const FlowState& state) {
  const int d = problem.disc().dim();
  const auto& settings = problem.data().settings;
  ComplementarityReport rep;
  const auto z = problem.slip(state.velocity);
  double lam_max = 1.0;
  for (const auto& l : state.lambda) lam_max = std::max(lam_max, l.head(d - 1).norm());
  rep.tol_stick = problem.stick_tolerance();
  rep.points = z.size();
  rep.is_stick.resize(z.size());
  auto fail = [&](const std::string& why) {
    if (rep.passed) rep.failure = why;
    rep.passed = false;
  };
  for (std::size_t i = 0; i < z.size(); ++i) {
    const Vec lam = state.lambda[i].head(d - 1);
    const Vec zi = z[i].head(d - 1);
    const double k = problem.k()[i];
    const double nl = lam.norm(), nz = zi.norm();
    rep.max_excess = std::max(rep.max_excess, nl - k);
    if (nl > k + 1e-8) fail("|lambda| > k at point " + std::to_string(i));
    const bool stick = nz <= rep.tol_stick;
    rep.is_stick[i] = stick;
    if (stick) {
      ++rep.stick;
      rep.max_stick_slip = std::max(rep.max_stick_slip, nz);
    } else {
      ++rep.slip;
    }
    if (nl <= k - 10.0 * settings.tol_uzawa * lam_max && !stick)
      fail("interior multiplier with nonzero slip at point " + std::to_string(i));
    if (!stick && k > 0.0) {
      const Vec dir = -zi / nz;
      const double along = lam.dot(dir);
      const double perp = (lam - along * dir).norm();
      const double angle = std::atan2(perp, along);
      const double gap = std::abs(nl - k) / k;
      rep.max_angle = std::max(rep.max_angle, angle);
      rep.max_k_gap = std::max(rep.max_k_gap, gap);
      if (angle > 1e-4) fail("multiplier not antiparallel to slip at point " + std::to_string(i));
      if (gap > 1e-6) fail("|lambda| != k at slipping point " + std::to_string(i));
    }
  }
  return rep;
}

}  // namespace tresca
