#include "tresca/assembly.hpp"
#include "tresca/constants.hpp"

#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

using namespace tresca;

namespace {

ChannelDomain channel(int dim, int resolution, ScalarFn h = [](const Vec&) { return 1.0; }) {
  ChannelDomain dom;
  dom.dim = dim;
  dom.lower = Vec::Zero(dim - 1);
  dom.upper = Vec::Ones(dim - 1);
  dom.height = std::move(h);
  dom.resolution = resolution;
  return dom;
}

Eigen::VectorXd random_vector(int n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v(i) = u(rng);
  return v;
}

double factorial(int n) { return n <= 1 ? 1.0 : n * factorial(n - 1); }

bool same_bits(const SparseMatrix& a, const SparseMatrix& b) {
  if (a.nonZeros() != b.nonZeros() || a.rows() != b.rows()) return false;
  for (Eigen::Index i = 0; i < a.nonZeros(); ++i)
    if (a.valuePtr()[i] != b.valuePtr()[i] || a.innerIndexPtr()[i] != b.innerIndexPtr()[i])
      return false;
  return true;
}

}  // namespace

TEST_CASE("structured channel mesh") {
  const Mesh m = build_mesh(channel(2, 2));
  CHECK(m.num_cells() == 8);
  int gamma0 = 0;
  for (const auto& f : m.facets()) {
    CHECK(f.normal.norm() == doctest::Approx(1.0));
    if (f.tag == FacetTag::gamma0) {
      ++gamma0;
      CHECK(f.normal(1) == doctest::Approx(-1.0));
      for (int i = 0; i < 2; ++i) CHECK(m.vertex(f.vertices[i])(1) == 0.0);
    }
    if (f.tag == FacetTag::gamma1) CHECK(f.normal(1) == doctest::Approx(1.0));
  }
  CHECK(gamma0 == 2);
  CHECK(m.omega_measure() == doctest::Approx(1.0));

  const Mesh sloped = build_mesh(channel(2, 4, [](const Vec& x) { return 1.0 + 0.5 * x(0); }));
  const Vec expected = Vec((Vec(2) << -0.5, 1.0).finished()).normalized();
  for (const auto& f : sloped.facets())
    if (f.tag == FacetTag::gamma1) CHECK((f.normal - expected).norm() < 1e-12);
  CHECK(sloped.omega_measure() == doctest::Approx(1.25));

  const Mesh cube = build_mesh(channel(3, 2));
  CHECK(cube.num_cells() == 48);
  CHECK(cube.omega_measure() == doctest::Approx(1.0));
  CHECK(cube.boundary_measure(FacetTag::gamma0) == doctest::Approx(1.0));
  CHECK(cube.boundary_measure(FacetTag::lateral) == doctest::Approx(4.0));

  ChannelDomain bad = channel(2, 2, [](const Vec& x) { return x(0) - 0.5; });
  CHECK_THROWS(build_mesh(bad));

  std::ostringstream os;
  write_mesh_vtk(m, os);
  CHECK(os.str().find("UNSTRUCTURED_GRID") != std::string::npos);
  CHECK(os.str().find("facet_tag") != std::string::npos);
}

TEST_CASE("simplex quadrature is exact for monomials") {
  for (int dim : {1, 2, 3})
    for (int degree = 1; degree <= 8; ++degree) {
      const QuadratureRule rule = simplex_rule(dim, degree);
      for (int a = 0; a <= degree; ++a)
        for (int b = 0; a + b <= degree; ++b) {
          const int c = dim == 3 ? degree - a - b : 0;
          double sum = 0.0;
          for (std::size_t q = 0; q < rule.size(); ++q) {
            const auto& l = rule.barycentric[q];
            double v = std::pow(l(1), a);
            if (dim >= 2) v *= std::pow(l(2), b);
            if (dim == 3) v *= std::pow(l(3), c);
            sum += rule.weights[q] * v;
          }
          const int bb = dim >= 2 ? b : 0;
          const double exact = factorial(a) * factorial(bb) * factorial(c) / factorial(a + bb + c + dim);
          CHECK(sum == doctest::Approx(exact).epsilon(1e-13));
          if (dim == 1) break;
        }
    }
}

TEST_CASE("P2 basis forms a partition of unity") {
  for (int dim : {2, 3}) {
    const ShapeTable t = make_shape_table(dim, simplex_rule(dim, 4));
    for (std::size_t q = 0; q < t.rule.size(); ++q) {
      double sum = 0.0;
      Eigen::Vector4d dsum = Eigen::Vector4d::Zero();
      for (int a = 0; a < t.num_p2; ++a) {
        sum += t.p2_value[q][a];
        dsum += t.p2_dlambda[q][a];
      }
      CHECK(sum == doctest::Approx(1.0).epsilon(1e-14));
      // the derivative along any barycentric direction summing to zero vanishes
      for (int i = 1; i <= dim; ++i) CHECK(std::abs(dsum(i) - dsum(0)) < 1e-13);
    }
  }
}

TEST_CASE("divergence examples") {
  const Discretization disc(build_mesh(channel(2, 3)), 4);
  const Eigen::VectorXd mass = p1_mass_vector(disc);
  CHECK(mass.sum() == doctest::Approx(1.0));
  auto field = [&](double a, double b, double c) {
    return interpolate_velocity(disc, [=](const Vec& x) {
      Vec v(2);
      v << a * x(0) + c, b * x(1) + c;
      return v;
    });
  };
  CHECK(assemble_divergence(disc, field(0, 0, 3.0)).cwiseAbs().maxCoeff() < 1e-13);
  CHECK(assemble_divergence(disc, field(1, -1, 0)).cwiseAbs().maxCoeff() < 1e-13);
  CHECK((assemble_divergence(disc, field(1, 1, 0)) - 2.0 * mass).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("friction force on a Gamma0 facet") {
  const Discretization disc(build_mesh(channel(2, 4)), 4);
  const auto& pts = disc.friction_points();
  const auto& facets = disc.mesh().facets();
  std::vector<double> facet_sum(facets.size(), 0.0);
  for (const auto& p : pts) facet_sum[p.facet] += p.weight;
  for (std::size_t f = 0; f < facets.size(); ++f)
    if (facets[f].tag == FacetTag::gamma0) CHECK(facet_sum[f] == doctest::Approx(facets[f].measure));

  std::vector<Vec> lambda(pts.size(), Vec::Zero(2));
  std::vector<double> k(pts.size(), 1.0);
  CHECK(assemble_friction(disc, lambda, k).norm() == 0.0);

  for (auto& l : lambda) l(0) = 0.4;
  const Eigen::VectorXd force = assemble_friction(disc, lambda, k);
  for (const auto& p : pts) {
    if (p.node < disc.num_vertices()) continue;  // edge midpoint: one facet
    const int idx = disc.velocity_free()[p.node * 2];
    REQUIRE(idx >= 0);
    CHECK(force(idx) == doctest::Approx(0.4 * 2.0 / 3.0 * facets[p.facet].measure));
  }

  std::vector<double> k0(pts.size(), 0.0);
  CHECK_THROWS_AS(assemble_friction(disc, lambda, k0), InvariantViolation);
}

TEST_CASE("flow assembly properties") {
  ChannelDomain dom = channel(2, 4, [](const Vec& x) { return 1.0 + 0.2 * std::sin(3.0 * x(0)); });
  const Discretization disc(build_mesh(dom), 4);
  std::mt19937_64 rng(21);
  const int n = disc.num_velocity_free();
  const Eigen::VectorXd theta = random_vector(disc.num_vertices(), rng);
  const Eigen::VectorXd frozen = disc.extend_velocity(random_vector(n, rng));
  const auto model = ViscosityModel::temperature_coupled(0.5, 2.0, 1.0, 0.3, 0.2);

  SUBCASE("zero fields give zero residual") {
    const FlowAssembler a(disc, model, 3.0, 0.0);
    const Eigen::VectorXd zero = Eigen::VectorXd::Zero(disc.velocity_size());
    CHECK(a.evaluate(theta, frozen, zero, {}, Execution::serial, false).residual.norm() == 0.0);
  }

  SUBCASE("serial and parallel assembly agree bit for bit") {
    const FlowAssembler a(disc, model, 1.5, 1e-8);
    const Eigen::VectorXd u = disc.extend_velocity(random_vector(n, rng));
    const FlowOperator s = a.evaluate(theta, frozen, u, {}, Execution::serial);
    const FlowOperator p = a.evaluate(theta, frozen, u, {}, Execution::parallel);
    CHECK(s.residual == p.residual);
    CHECK(same_bits(s.jacobian, p.jacobian));
    const FlowOperator again = a.evaluate(theta, frozen, u, {}, Execution::parallel);
    CHECK(same_bits(p.jacobian, again.jacobian));
  }

  SUBCASE("discrete operator is monotone") {
    for (double p : {1.3, 2.0, 3.0}) {
      const FlowAssembler a(disc, model, p, 0.0);
      for (int trial = 0; trial < 20; ++trial) {
        const Eigen::VectorXd v1 = random_vector(n, rng);
        const Eigen::VectorXd v2 = (trial % 2 ? 1e-3 : 1.0) * random_vector(n, rng);
        const Eigen::VectorXd r1 =
            a.evaluate(theta, frozen, disc.extend_velocity(v1), {}, Execution::parallel, false).residual;
        const Eigen::VectorXd r2 =
            a.evaluate(theta, frozen, disc.extend_velocity(v2), {}, Execution::parallel, false).residual;
        const double gap = (r1 - r2).dot(v1 - v2);
        CHECK(gap >= -1e-12 * (r1.norm() + r2.norm()) * (v1 - v2).norm());
      }
    }
  }

  SUBCASE("p = 2 constant viscosity Jacobian is symmetric positive semidefinite") {
    const FlowAssembler a(disc, ViscosityModel::constant(1.3), 2.0, 0.0);
    const Eigen::VectorXd u = disc.extend_velocity(random_vector(n, rng));
    const SparseMatrix J = a.evaluate(theta, frozen, u, {}, Execution::parallel).jacobian;
    const SparseMatrix JT = J.transpose();
    CHECK((J - JT).norm() <= 1e-14 * J.norm());
    for (int i = 0; i < 20; ++i) {
      const Eigen::VectorXd w = random_vector(n, rng);
      CHECK(w.dot(J * w) >= 0.0);
    }
    // linear operator: residual is J u
    const Eigen::VectorXd r = a.evaluate(theta, frozen, u, {}, Execution::parallel, false).residual;
    CHECK((r - J * disc.restrict_velocity(u)).norm() <= 1e-12 * r.norm());
  }
}

TEST_CASE("heat assembly") {
  ChannelDomain dom = channel(2, 5, [](const Vec& x) { return 1.0 + 0.3 * x(0); });
  const Discretization disc(build_mesh(dom), 4);
  std::mt19937_64 rng(5);
  Mat K(2, 2);
  K << 2.0, 0.5, 0.5, 1.0;
  const double k0 = Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d>(Eigen::Matrix2d(K)).eigenvalues()(0);
  const HeatAssembler heat(disc, K);
  const Eigen::VectorXd u = random_vector(disc.velocity_size(), rng);

  const SparseMatrix D = heat.diffusion(Execution::parallel);
  const SparseMatrix DT = D.transpose();
  CHECK((D - DT).norm() <= 1e-14 * D.norm());

  const SparseMatrix C = heat.convection(u, Execution::parallel);
  const SparseMatrix CT = C.transpose();
  CHECK((C + CT).norm() <= 1e-14 * C.norm());

  const SparseMatrix A = heat.matrix(u, Execution::parallel);
  const SparseMatrix S = temperature_forms(disc).stiffness;
  for (int i = 0; i < 100; ++i) {
    const Eigen::VectorXd w = random_vector(A.rows(), rng);
    CHECK(w.dot(A * w) >= (1.0 - 1e-12) * k0 * w.dot(S * w));
  }

  CHECK(same_bits(heat.matrix(u, Execution::serial), A));
  CHECK_THROWS_AS(assemble_heat(heat, ViscosityModel::constant(1.0), 2.0, 0.0,
                                Eigen::VectorXd::Zero(disc.num_vertices()), u, HeatSource{}, {}),
                  DomainError);
}

TEST_CASE("heat source family") {
  HeatSource r;
  r.kind = HeatSource::Kind::saturating;
  r.r0 = 0.05;
  r.r1 = 0.02;
  r.scale = 0.5;
  CHECK(r.sup() == doctest::Approx(0.07));
  for (double t = -50.0; t <= 50.0; t += 0.5) CHECK(std::abs(r(t)) <= r.sup());
  CHECK_FALSE(r.independent_of_theta());
}
