#include "tresca/coupled.hpp"
#include "tresca/verification.hpp"

#include <doctest.h>

#include <cmath>

using namespace tresca;

namespace {

nlohmann::json zero_data_doc() {
  return nlohmann::json::parse(R"({
    "dimension": 2, "resolution": 4, "p": 2, "q": 1.25,
    "viscosity": {"kind": "shear_thickening", "mu0": 1, "mu1": 2, "a": 1},
    "f": ["0", "0"], "G": ["0", "0"], "s": ["0", "0"], "k": "0.5",
    "heat_source": {"kind": "constant", "value": 0}, "theta_b": "0",
    "schedule": [1, 10]
  })");
}

}  // namespace

TEST_CASE("continuation schedule validation") {
  ContinuationSchedule s;
  s.m = {1, 10, 100};
  CHECK_NOTHROW(s.check());
  s.m = {1, 10, 10};
  CHECK_THROWS_AS(s.check(), ConfigError);
  s.m = {0, 10};
  CHECK_THROWS_AS(s.check(), ConfigError);
  s.m = {};
  CHECK_THROWS_AS(s.check(), ConfigError);
}

TEST_CASE("zero data stays at the zero fixed point") {
  const CoupledProblem problem(parse_config_json(zero_data_doc()));
  const CoupledState s0 = zero_coupled_state(problem, 1.0);
  const CoupledState s1 = fixed_point_step(problem, s0);
  CHECK(s1.flow.velocity.norm() == 0.0);
  CHECK(s1.heat.theta.norm() == 0.0);
  CHECK(convergence_metric(problem.disc(), s0, s1, 2.0, 1.25) == 0.0);

  const CoupledResult r = solve_coupled(problem, ContinuationSchedule::from_config(problem.config()));
  REQUIRE(r.report.stages.size() == 2);
  for (const auto& st : r.report.stages) {
    CHECK(st.final_metric == 0.0);
    CHECK(st.velocity_norm == 0.0);
    CHECK(st.theta_norm_1q == 0.0);
  }
}

TEST_CASE("convergence metric") {
  const CoupledProblem problem(builtin_reference_config());
  const Discretization& disc = problem.disc();
  const CoupledState a = zero_coupled_state(problem, 1.0);
  const CoupledState b = fixed_point_step(problem, a);
  CHECK(convergence_metric(disc, b, b, 2.0, 1.25) == 0.0);
  CHECK(convergence_metric(disc, a, b, 2.0, 1.25) == convergence_metric(disc, b, a, 2.0, 1.25));

  SUBCASE("single hat-function perturbation") {
    const Mesh& mesh = disc.mesh();
    int node = -1;
    for (int v = 0; v < disc.num_vertices() && node < 0; ++v)
      if (disc.temperature_free()[v] >= 0 && mesh.vertex(v)(1) > 0.2) node = v;
    REQUIRE(node >= 0);
    const double q = 1.25;
    double integral = 0.0;
    for (std::size_t c = 0; c < mesh.num_cells(); ++c)
      for (int i = 0; i < 3; ++i)
        if (mesh.cell(c)[i] == node)
          integral += mesh.cell_volume(c) * std::pow(mesh.barycentric_gradients(c).row(i).head(2).norm(), q);
    const double hat_norm = std::pow(integral, 1.0 / q);
    for (double eps : {1e-3, 0.5, 7.0}) {
      CoupledState c = b;
      c.heat.theta(node) += eps;
      CHECK(convergence_metric(disc, b, c, 2.0, q) == doctest::Approx(eps * hat_norm).epsilon(1e-12));
    }
  }

  SUBCASE("mismatched states are rejected") {
    CoupledState bad = b;
    bad.heat.theta.conservativeResize(3);
    CHECK_THROWS_AS(convergence_metric(disc, b, bad, 2.0, 1.25), DomainError);
  }

  SUBCASE("steps are deterministic") {
    const CoupledState c = fixed_point_step(problem, a);
    CHECK(c.flow.velocity == b.flow.velocity);
    CHECK(c.heat.theta == b.heat.theta);
  }
}

TEST_CASE("decoupled data reach the fixed point in one step") {
  const DecoupledOracle o = decoupled_oracle(builtin_reference_config());
  CHECK(o.first_metric > 0.0);
  CHECK(o.second_metric <= o.tolerance);
  CHECK(o.direct_gap <= o.tolerance);
  CHECK(o.passed);
}

TEST_CASE("reference continuation") {
  ProblemConfig config = builtin_reference_config();
  config.schedule = {1, 10, 100};
  const CoupledProblem problem(config);
  int steps = 0;
  const CoupledResult r = solve_coupled(problem, ContinuationSchedule::from_config(config), Execution::parallel,
                                        [&](const CoupledState&, const StepRecord& rec) {
                                          ++steps;
                                          CHECK(rec.regularization.passed);
                                        });
  REQUIRE(r.report.stages.size() == 3);
  int total = 0;
  double lo = 1e300, hi = 0.0;
  for (const auto& st : r.report.stages) {
    total += st.iterations;
    CHECK(st.reduction >= 1e3);
    CHECK(st.complementarity_ok);
    CHECK(st.r_delta_ok);
    lo = std::min(lo, st.theta_norm_1q);
    hi = std::max(hi, st.theta_norm_1q);
  }
  CHECK(steps == total);
  CHECK(hi / lo <= 1.2);
  CHECK(r.report.flow_bound_ok);
  CHECK(r.report.heat_bound_ok);
  CHECK(r.report.pressure_recovery_gap < 1e-8);
  // lateral corners on Gamma0 carry |G| = 0.5 and k0 = 1
  const double h = problem.disc().mesh().max_cell_diameter();
  CHECK(r.report.mesh_peclet >= 0.25 * h);
  CHECK(r.report.peclet_ok);
  CHECK(r.state.delta == doctest::Approx(0.01));
}
