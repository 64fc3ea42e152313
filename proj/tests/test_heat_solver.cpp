#include "tresca/constants.hpp"
#include "tresca/heat_solver.hpp"
#include "tresca/verification.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace tresca;

namespace {

Discretization channel_disc(int resolution) {
  ChannelDomain dom;
  dom.dim = 2;
  dom.lower = Vec::Zero(1);
  dom.upper = Vec::Ones(1);
  dom.height = [](const Vec& x) { return 1.0 + 0.25 * x(0); };
  dom.resolution = resolution;
  return Discretization(build_mesh(dom), 4);
}

HeatData base_data() {
  HeatData d;
  d.K = Mat::Identity(2, 2);
  return d;
}

Eigen::VectorXd shear_velocity(const Discretization& disc, double a) {
  return interpolate_velocity(disc, [a](const Vec& x) {
    Vec v(2);
    v << a * (1.0 - x(1)) * x(1) + 0.3 * a, 0.0;
    return v;
  });
}

}  // namespace

TEST_CASE("zero loads give zero temperature") {
  const Discretization disc = channel_disc(4);
  const HeatState st = solve_heat_linear(disc, base_data(), Eigen::VectorXd::Zero(disc.velocity_size()),
                                         Eigen::VectorXd::Zero(disc.num_vertices()), 0.1);
  CHECK(st.theta.norm() == 0.0);
  CHECK(st.norm_1q == 0.0);

  const HeatSolver solver(disc, base_data());
  const EstimateConstants c = estimate_constants(disc, 2.0, 1.25);
  const UniformBoundReport rep =
      uniform_w1q_check(solver, Eigen::VectorXd::Zero(disc.num_vertices()), {1, 0.1, 0.01, 0.001}, c);
  CHECK(rep.passed);
  for (double n : rep.norms_1q) CHECK(n == 0.0);
  CHECK_THROWS_AS(uniform_w1q_check(solver, Eigen::VectorXd::Zero(disc.num_vertices()), {1, 0.1}, c),
                  DomainError);
}

TEST_CASE("linearized heat solve") {
  const Discretization disc = channel_disc(6);
  HeatData data = base_data();
  data.model = ViscosityModel::shear_thickening(0.5, 2.0, 1.0);
  data.r.r0 = 0.1;
  data.theta_b = [](const Vec& x) { return std::sin(3.0 * x(0)); };
  HeatSolver solver(disc, data);
  const Eigen::VectorXd u = shear_velocity(disc, 2.0);
  solver.set_velocity(u);
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Eigen::VectorXd prev1(disc.num_vertices()), prev2(disc.num_vertices());
  for (int i = 0; i < prev1.size(); ++i) {
    prev1(i) = dist(rng);
    prev2(i) = 5.0 * dist(rng);
  }

  const HeatState a = solver.solve(prev1, 0.05);
  CHECK(a.linear_residual <= 1e-12);
  for (int v = 0; v < disc.num_vertices(); ++v)
    if (disc.temperature_free()[v] < 0) CHECK(a.theta(v) == 0.0);

  SUBCASE("solution does not read theta_prev when mu and r ignore it") {
    const HeatState b = solver.solve(prev2, 0.05);
    CHECK(a.theta == b.theta);
  }

  SUBCASE("repeated solves are bit identical") {
    const HeatState b = solver.solve(prev1, 0.05);
    CHECK(a.theta == b.theta);
    const HeatState c = solve_heat_linear(disc, data, u, prev1, 0.05, Execution::serial);
    CHECK(a.theta == c.theta);
  }

  SUBCASE("superposition of the load pieces") {
    const Eigen::VectorXd sum = solver.solve_free(a.load.dissipation) +
                                solver.solve_free(a.load.source) + solver.solve_free(a.load.boundary);
    const Eigen::VectorXd whole = disc.restrict_temperature(a.theta);
    CHECK((sum - whole).norm() <= 1e-11 * whole.norm());
  }

  SUBCASE("convection does no work on the solution") {
    const SparseMatrix C = solver.assembler().convection(u, Execution::parallel);
    const Eigen::VectorXd t = disc.restrict_temperature(a.theta);
    const SparseMatrix absC = C.cwiseAbs();
    CHECK(std::abs(t.dot(C * t)) <= 1e-14 * t.cwiseAbs().dot(absC * t.cwiseAbs()));
  }

  SUBCASE("W^{1,2} norm stays under R_delta") {
    const EstimateConstants c = estimate_constants(disc, 2.0, 1.25);
    for (double delta : {1.0, 0.1, 0.01}) {
      const HeatState s = solver.solve(prev1, delta);
      CHECK(s.norm_12 <= r_delta_bound(c, delta, data.r.sup()));
    }
  }
}

TEST_CASE("regularization bounds") {
  const Discretization disc = channel_disc(4);
  HeatData data = base_data();
  data.model = ViscosityModel::constant(1.5);
  const Eigen::VectorXd zero_t = Eigen::VectorXd::Zero(disc.num_vertices());

  const RegularizationReport z =
      verify_regularization_bounds(disc, data, zero_t, Eigen::VectorXd::Zero(disc.velocity_size()), 0.5);
  CHECK(z.g_inf == 0.0);
  CHECK(z.g_l1 == 0.0);

  const Eigen::VectorXd u = shear_velocity(disc, 1e3);
  const RegularizationReport r = verify_regularization_bounds(disc, data, zero_t, u, 1e-3);
  CHECK(r.passed);
  CHECK(r.g_inf <= 1000.0);
  CHECK(r.g_inf > 900.0);

  // constant mu = mu1: the L1 bound is attained as delta -> 0
  const Discretization one(build_mesh([] {
                             ChannelDomain d;
                             d.dim = 2;
                             d.lower = Vec::Zero(1);
                             d.upper = Vec::Ones(1);
                             d.height = [](const Vec&) { return 1.0; };
                             d.resolution = 1;
                             return d;
                           }()),
                           4);
  const Eigen::VectorXd w = shear_velocity(one, 1.0);
  const RegularizationReport lim =
      verify_regularization_bounds(one, data, Eigen::VectorXd::Zero(one.num_vertices()), w, 1e-12);
  CHECK(lim.g_l1 == doctest::Approx(lim.bound_l1).epsilon(1e-9));
  CHECK(lim.g_l1 <= lim.bound_l1);
}

TEST_CASE("uniform W^{1,q} estimate on the reference configuration") {
  const ProblemConfig config = builtin_reference_config();
  const Discretization disc(build_mesh(config.domain()), config.quadrature_degree());
  HeatSolver solver(disc, heat_data(config));
  solver.set_velocity(interpolate_velocity(disc, config.G_fn()));
  const EstimateConstants c = with_data(estimate_constants(disc, config.p, config.q), config);
  const UniformBoundReport rep =
      uniform_w1q_check(solver, Eigen::VectorXd::Zero(disc.num_vertices()), {1, 0.1, 0.01, 0.001}, c);
  CHECK(rep.ratio <= 1.2);
  CHECK(rep.bound_ok);
  CHECK(rep.r_delta_ok);
  CHECK(rep.passed);
}
