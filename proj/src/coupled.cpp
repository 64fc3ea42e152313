#include "tresca/coupled.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>

namespace tresca {

namespace {

std::string state_hash(const CoupledState& st) {
  std::string bytes;
  auto append = [&](const Eigen::VectorXd& v) {
    bytes.append(reinterpret_cast<const char*>(v.data()), sizeof(double) * v.size());
  };
  append(st.flow.velocity);
  append(st.flow.pressure);
  append(st.heat.theta);
  return fnv1a_hex(bytes);
}

}  // namespace

ContinuationSchedule ContinuationSchedule::from_config(const ProblemConfig& config) {
  ContinuationSchedule s;
  s.m = config.schedule;
  s.tol_fp = config.solver.tol_fp;
  s.max_fp = config.solver.max_fp;
  s.min_fp = config.solver.min_fp;
  return s;
}

void ContinuationSchedule::check() const {
  if (m.empty()) throw ConfigError("schedule must not be empty");
  for (std::size_t i = 0; i < m.size(); ++i)
    if (m[i] < 1 || (i > 0 && m[i] <= m[i - 1]))
      throw ConfigError("schedule must be strictly increasing positive integers");
  if (!(tol_fp > 0.0) || max_fp < 1 || min_fp < 1)
    throw ConfigError("fixed-point tolerance and iteration limits must be positive");
}

CoupledProblem::CoupledProblem(ProblemConfig config) : config_(std::move(config)) {
  disc_ = std::make_unique<Discretization>(build_mesh(config_.domain()), config_.quadrature_degree());
  flow_ = std::make_unique<FlowProblem>(*disc_, flow_data(config_));
  heat_ = heat_data(config_);
}

CoupledState zero_coupled_state(const CoupledProblem& problem, double delta) {
  CoupledState st;
  st.flow = zero_flow_state(problem.flow());
  st.heat = zero_heat_state(problem.disc(), delta);
  st.delta = delta;
  return st;
}

CoupledState fixed_point_step(const CoupledProblem& problem, const CoupledState& state,
                              Execution exec, StepRecord* record) {
  const FlowProblem& flow = problem.flow();
  const Discretization& disc = problem.disc();
  const double omega = problem.config().solver.relaxation;

  const Eigen::VectorXd u_k = flow.total_velocity(state.flow.velocity);
  CoupledState next;
  next.flow = solve_flow_vi(flow, state.heat.theta, u_k, state.flow_solved ? &state.flow : nullptr,
                            exec);
  if (omega != 1.0 && state.flow_solved) {
    next.flow.velocity = omega * next.flow.velocity + (1.0 - omega) * state.flow.velocity;
    next.flow.pressure = omega * next.flow.pressure + (1.0 - omega) * state.flow.pressure;
    for (std::size_t i = 0; i < next.flow.lambda.size(); ++i)
      next.flow.lambda[i] = omega * next.flow.lambda[i] + (1.0 - omega) * state.flow.lambda[i];
  }
  const Eigen::VectorXd u_next = flow.total_velocity(next.flow.velocity);

  HeatSolver heat(disc, problem.heat());
  heat.set_velocity(u_next, exec);
  const RegularizationReport reg =
      verify_regularization_bounds(disc, problem.heat(), state.heat.theta, u_next, state.delta);
  next.heat = heat.solve(state.heat.theta, state.delta, exec);
  if (omega != 1.0 && state.flow_solved) {
    next.heat.theta = omega * next.heat.theta + (1.0 - omega) * state.heat.theta;
    next.heat.norm_12 = temperature_w1q(disc, next.heat.theta, 2.0);
    next.heat.norm_1q = temperature_w1q(disc, next.heat.theta, problem.heat().q);
  }

  next.iteration = state.iteration + 1;
  next.delta = state.delta;
  next.flow_solved = true;
  next.metrics = state.metrics;
  const double metric =
      convergence_metric(disc, state, next, problem.config().p, problem.config().q);
  next.metrics.push_back(metric);
  if (record) {
    record->metric = metric;
    record->regularization = reg;
    record->newton_iterations = next.flow.diag.newton_iterations;
    record->uzawa_iterations = next.flow.diag.uzawa_iterations;
  }
  return next;
}

double convergence_metric(const Discretization& disc, const CoupledState& prev,
                          const CoupledState& next, double p, double q) {
  if (prev.heat.theta.size() != disc.num_vertices() || next.heat.theta.size() != disc.num_vertices() ||
      prev.flow.velocity.size() != disc.velocity_size() ||
      next.flow.velocity.size() != disc.velocity_size())
    throw DomainError("states live on different meshes");
  return temperature_w1q(disc, next.heat.theta - prev.heat.theta, q) +
         velocity_w1p(disc, next.flow.velocity - prev.flow.velocity, p);
}

CoupledResult solve_coupled(const CoupledProblem& problem, const ContinuationSchedule& schedule,
                            Execution exec, const StepObserver& observer) {
  schedule.check();
  const ProblemConfig& config = problem.config();
  const Discretization& disc = problem.disc();
  const FlowProblem& flow = problem.flow();
  validate_exponents(config.p, config.q);

  CoupledResult result;
  CoupledReport& rep = result.report;
  CoupledState state = zero_coupled_state(problem, 1.0 / schedule.m.front());
  rep.init_hash = state_hash(state);

  ConstantsOptions opts;
  opts.seed = config.seed + 7;
  rep.constants = with_data(estimate_constants(disc, config.p, config.q, opts), config);
  rep.flow_norms = flow_data_norms(disc, config);
  rep.flow_bound = c_flow_bound(rep.constants, config.p, rep.flow_norms).t_star;

  double previous_first = std::numeric_limits<double>::quiet_NaN();
  for (int m : schedule.m) {
    StageReport stage;
    stage.m = m;
    stage.delta = 1.0 / m;
    state.delta = stage.delta;
    state.iteration = 0;
    state.metrics.clear();
    for (int it = 1;; ++it) {
      StepRecord rec;
      state = fixed_point_step(problem, state, exec, &rec);
      if (observer) observer(state, rec);
      ++stage.regularization_checks;
      stage.max_g_inf = std::max(stage.max_g_inf, rec.regularization.g_inf);
      stage.newton_iterations += rec.newton_iterations;
      stage.uzawa_iterations += rec.uzawa_iterations;
      const double scale = std::max(1.0, state.flow.diag.velocity_norm + state.heat.norm_1q);
      stage.tolerance = schedule.tol_fp * scale;
      if (it >= schedule.min_fp && rec.metric <= stage.tolerance) break;
      if (it >= schedule.max_fp)
        throw SolverError("fixed point did not converge at delta = 1/" + std::to_string(m),
                          state.metrics);
    }
    stage.iterations = state.iteration;
    stage.metrics = state.metrics;
    stage.first_metric = state.metrics.front();
    stage.final_metric = state.metrics.back();
    stage.reduction = stage.final_metric == 0.0 ? std::numeric_limits<double>::infinity()
                                                : stage.first_metric / stage.final_metric;
    stage.theta_norm_1q = state.heat.norm_1q;
    stage.theta_norm_12 = state.heat.norm_12;
    stage.velocity_norm = state.flow.diag.velocity_norm;
    stage.r_delta = r_delta_bound(rep.constants, stage.delta, problem.heat().r.sup());
    stage.r_delta_ok = stage.theta_norm_12 <= stage.r_delta;
    const ComplementarityReport comp = check_complementarity(flow, state.flow);
    stage.complementarity_ok = comp.passed;
    stage.stick_points = comp.stick;
    stage.slip_points = comp.slip;
    if (stage.velocity_norm > rep.flow_bound) rep.flow_bound_ok = false;

    const Eigen::VectorXd u = flow.total_velocity(state.flow.velocity);
    double speed = 0.0;
    for (int n = 0; n < disc.num_nodes(); ++n)
      speed = std::max(speed, u.segment(n * disc.dim(), disc.dim()).norm());
    rep.mesh_peclet = std::max(rep.mesh_peclet, speed * disc.mesh().max_cell_diameter() /
                                                    (2.0 * problem.heat().k0));
    rep.peclet_ok = rep.mesh_peclet <= kPecletWarning;
    const double energy = heat_energy_term(disc, problem.heat(), u);
    const double bound = c_heat_bound(rep.constants, config.q, energy).bound;
    rep.heat_energy = std::max(rep.heat_energy, energy);
    rep.heat_bound = std::max(rep.heat_bound, bound);
    if (stage.theta_norm_1q > bound) rep.heat_bound_ok = false;
    if (std::isfinite(previous_first) && stage.first_metric > 10.0 * previous_first)
      rep.warm_start_guard = false;
    previous_first = stage.first_metric;
    rep.stages.push_back(std::move(stage));
  }

  double tmin = std::numeric_limits<double>::infinity(), tmax = 0.0;
  for (const auto& s : rep.stages) {
    tmin = std::min(tmin, s.theta_norm_1q);
    tmax = std::max(tmax, s.theta_norm_1q);
  }
  rep.stage_theta_ratio = tmax == 0.0 ? 1.0 : tmax / tmin;

  // both subproblems re-evaluated with live coupling arguments
  const Eigen::VectorXd u = flow.total_velocity(state.flow.velocity);
  const Eigen::VectorXd r = momentum_residual(flow, state.flow, state.heat.theta, u, exec);
  rep.flow_self_consistency =
      r.norm() / std::max(state.flow.diag.residual_scale, std::numeric_limits<double>::min());
  if (state.flow.diag.residual_scale == 0.0) rep.flow_self_consistency = r.norm();
  HeatSolver heat(disc, problem.heat());
  heat.set_velocity(u, exec);
  const Eigen::VectorXd load =
      assemble_heat_load(disc, problem.heat().model, config.p, state.delta, state.heat.theta, u,
                         problem.heat().r, problem.heat().theta_b, exec)
          .total();
  const Eigen::VectorXd hres = heat.matrix() * disc.restrict_temperature(state.heat.theta) - load;
  rep.heat_self_consistency = load.norm() == 0.0 ? hres.norm() : hres.norm() / load.norm();

  const Eigen::VectorXd recovered = recover_pressure(flow, state.flow, state.heat.theta, u, exec);
  rep.pressure_recovery_gap =
      (recovered - state.flow.pressure).norm() / std::max(1.0, state.flow.pressure.norm());
  rep.divergence_residual = state.flow.diag.divergence_residual;

  result.state = std::move(state);
  return result;
}

}  // namespace tresca
