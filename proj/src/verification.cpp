#include "tresca/verification.hpp"

#include "tresca/exponents.hpp"
#include "tresca/mms.hpp"

#include <cmath>
#include <random>
#include <sstream>

namespace tresca {

namespace {

const char* kReferenceConfig = R"json({
  "dimension": 2,
  "domain": {"lower": [0], "upper": [1], "height": "1"},
  "resolution": 8,
  "p": 2,
  "q": 1.25,
  "viscosity": {"kind": "temperature_coupled", "mu0": 0.5, "mu1": 1, "a": 1, "beta": 0.1, "base": 0.8},
  "f": ["0", "0"],
  "G": ["0.5 * (1 - x2)", "0"],
  "s": ["0.5", "0"],
  "k": "0.1 + 0.75 * x1",
  "conductivity": {"K": [[1, 0], [0, 1]], "k0": 1},
  "heat_source": {"kind": "saturating", "r0": 0.05, "r1": 0.02, "scale": 1, "sup": 0.07},
  "theta_b": "0.1 * sin(pi * x1)",
  "schedule": [1, 10, 100, 1000],
  "seed": 1
})json";

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

}  // namespace

ProblemConfig builtin_reference_config() {
  return parse_config_json(nlohmann::json::parse(kReferenceConfig));
}

JacobianCheck check_flow_jacobian(const Discretization& disc, const ViscosityModel& model, double p,
                                  int states, std::uint64_t seed, double tol) {
  JacobianCheck out;
  out.states = states;
  const FlowAssembler assembler(disc, model, p, 1e-8);
  const int n = disc.num_velocity_free();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  auto random = [&](int size) {
    Eigen::VectorXd v(size);
    for (int i = 0; i < size; ++i) v(i) = dist(rng);
    return v;
  };
  const Eigen::VectorXd load;
  for (int s = 0; s < states; ++s) {
    const Eigen::VectorXd v = random(n);
    const Eigen::VectorXd theta = random(disc.num_vertices());
    const Eigen::VectorXd u_frozen = disc.extend_velocity(random(n));
    const Eigen::VectorXd u = disc.extend_velocity(v);
    const FlowOperator op = assembler.evaluate(theta, u_frozen, u, load, Execution::parallel, true);
    for (int k = 0; k < 3; ++k) {
      const Eigen::VectorXd w = random(n);
      const double h = 1e-6 * std::max(1.0, v.norm()) / w.norm();
      const Eigen::VectorXd plus = disc.extend_velocity(v + h * w);
      const Eigen::VectorXd minus = disc.extend_velocity(v - h * w);
      const Eigen::VectorXd fd =
          (assembler.evaluate(theta, u_frozen, plus, load, Execution::parallel, false).residual -
           assembler.evaluate(theta, u_frozen, minus, load, Execution::parallel, false).residual) /
          (2.0 * h);
      const Eigen::VectorXd jw = op.jacobian * w;
      out.max_relative_error = std::max(out.max_relative_error, (fd - jw).norm() / jw.norm());
    }
  }
  out.passed = out.max_relative_error <= tol;
  return out;
}

SkewCheck check_heat_skew(const Discretization& disc, int samples, std::uint64_t seed, double tol) {
  SkewCheck out;
  out.samples = samples;
  const HeatAssembler heat(disc, Mat::Identity(disc.dim(), disc.dim()));
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Eigen::VectorXd u(disc.velocity_size());
  for (int i = 0; i < u.size(); ++i) u(i) = dist(rng);
  const SparseMatrix C = heat.convection(u, Execution::parallel);
  const SparseMatrix absC = C.cwiseAbs();
  for (int s = 0; s < samples; ++s) {
    Eigen::VectorXd w(C.rows());
    for (int i = 0; i < w.size(); ++i) w(i) = dist(rng);
    const double form = w.dot(C * w);
    const Eigen::VectorXd aw = w.cwiseAbs();
    out.max_relative = std::max(out.max_relative, std::abs(form) / aw.dot(absC * aw));
  }
  out.passed = out.max_relative <= tol;
  return out;
}

DualityCheck check_exponent_duality(int p_points) {
  DualityCheck out;
  std::vector<double> qs;
  for (int j = 0; j < 50; ++j) qs.push_back(1.0 + 0.5 * j / 50.0);
  for (int i = 1; i <= p_points; ++i) {
    const double p = 1.5 + 4.5 * i / p_points;
    const CompatibilityWindow win = valid_q_range(p);
    for (double q : qs) {
      ++out.points;
      if (win.contains(q) != min_p_for_q(q).admits(p)) ++out.mismatches;
    }
    const double next = 1.5 + 4.5 * (i + 1) / p_points;
    if (!(compatibility_curve(next) < compatibility_curve(p))) out.curve_decreasing = false;
  }
  out.passed = out.mismatches == 0 && out.curve_decreasing;
  return out;
}

DecoupledOracle decoupled_oracle(const ProblemConfig& config, Execution exec) {
  ProblemConfig cfg = config;
  cfg.viscosity = ViscosityModel::constant(config.viscosity.mu1());
  cfg.r = HeatSource{};
  cfg.r.r0 = config.r.r0;
  const CoupledProblem problem(cfg);
  const double delta = 1.0 / cfg.schedule.front();
  CoupledState s0 = zero_coupled_state(problem, delta);
  StepRecord r1, r2;
  const CoupledState s1 = fixed_point_step(problem, s0, exec, &r1);
  const CoupledState s2 = fixed_point_step(problem, s1, exec, &r2);

  // separate solves of each subproblem
  const Discretization& disc = problem.disc();
  const FlowState direct_flow = solve_flow_vi(problem.flow(), Eigen::VectorXd::Zero(disc.num_vertices()),
                                              Eigen::VectorXd::Zero(disc.velocity_size()), nullptr, exec);
  const HeatState direct_heat =
      solve_heat_linear(disc, problem.heat(), problem.flow().total_velocity(direct_flow.velocity),
                        Eigen::VectorXd::Zero(disc.num_vertices()), delta, exec);
  CoupledState direct = s1;
  direct.flow = direct_flow;
  direct.heat = direct_heat;

  DecoupledOracle out;
  out.first_metric = r1.metric;
  out.second_metric = r2.metric;
  const double scale = std::max(1.0, s2.flow.diag.velocity_norm + s2.heat.norm_1q);
  out.tolerance = 10.0 * cfg.solver.tol_fp * scale;
  out.direct_gap = convergence_metric(disc, s1, direct, cfg.p, cfg.q);
  out.passed = out.second_metric <= out.tolerance && out.direct_gap <= out.tolerance;
  return out;
}

bool VerificationReport::passed() const {
  for (const auto& c : checks)
    if (!c.passed) return false;
  return true;
}

nlohmann::json VerificationReport::to_json() const {
  nlohmann::json out;
  out["seed"] = seed;
  out["samples"] = samples;
  out["passed"] = passed();
  out["checks"] = nlohmann::json::array();
  for (const auto& c : checks)
    out["checks"].push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
  out["warnings"] = warnings;
  return out;
}

VerificationReport run_verification_suite(std::uint64_t seed, std::size_t samples, Execution exec) {
  VerificationReport rep;
  rep.seed = seed;
  rep.samples = samples;
  if (samples == 0) {
    rep.warnings.push_back("sample count is 0: no checks were run");
    return rep;
  }
  auto add = [&](std::string name, bool ok, std::string detail) {
    rep.checks.push_back({std::move(name), ok, std::move(detail)});
  };

  const std::vector<ViscosityModel> models{
      ViscosityModel::constant(1.0), ViscosityModel::shear_thickening(0.5, 2.0, 1.5),
      ViscosityModel::temperature_coupled(0.5, 2.0, 1.0, 0.3, 0.2)};
  std::uint64_t stream = seed;
  for (const auto& model : models)
    for (double p : {1.2, 1.5, 2.0, 2.5, 3.0, 4.0})
      for (int dim : {2, 3}) {
        const std::string tag = model.name() + " p=" + fmt(p) + " d=" + std::to_string(dim);
        const SampleStats m = sample_monotonicity(model, p, dim, samples, ++stream);
        add("monotonicity " + tag, m.passed(), "worst slack " + fmt(m.worst));
        const SampleStats b = sample_F_bound(model, p, dim, samples, ++stream);
        add("F bound " + tag, b.passed(), "worst slack " + fmt(b.worst));
        const SampleStats g = sample_g_delta_sandwich(model, p, dim, samples, ++stream);
        add("g_delta sandwich " + tag, g.passed(), "worst slack " + fmt(g.worst));
      }
  for (double p : {1.2, 1.5, 1.8, 2.0, 2.5, 3.0, 4.0}) {
    const SampleStats s = sample_strong_monotonicity(p, 3, samples, ++stream, 1e-10);
    add("strong monotonicity p=" + fmt(p), s.passed(), "worst slack " + fmt(s.worst));
  }

  const DualityCheck dual = check_exponent_duality();
  add("exponent duality", dual.passed, std::to_string(dual.mismatches) + " mismatches");

  ChannelDomain dom;
  dom.dim = 2;
  dom.lower = Vec::Zero(1);
  dom.upper = Vec::Ones(1);
  dom.height = [](const Vec& x) { return 1.0 + 0.2 * std::sin(3.0 * x(0)); };
  dom.resolution = 6;
  const Discretization disc(build_mesh(dom), 4);
  for (double p : {1.5, 2.0, 3.0}) {
    const JacobianCheck j = check_flow_jacobian(disc, models[2], p, 5, ++stream);
    add("flow Jacobian p=" + fmt(p), j.passed, "max relative error " + fmt(j.max_relative_error));
  }
  const SkewCheck skew = check_heat_skew(disc, 100, ++stream);
  add("heat convection skew", skew.passed, "max relative form " + fmt(skew.max_relative));

  const DecoupledOracle dec = decoupled_oracle(builtin_reference_config(), exec);
  add("decoupled fixed point", dec.passed,
      "second metric " + fmt(dec.second_metric) + ", direct gap " + fmt(dec.direct_gap));

  for (const auto& name : mms_cases()) {
    const MmsResult r = run_mms(name, 3, 4, exec);
    std::string orders;
    for (double o : r.orders) orders += (orders.empty() ? "" : ", ") + fmt(o);
    add("mms " + name, r.passed, "orders " + orders);
  }
  return rep;
}

}  // namespace tresca
