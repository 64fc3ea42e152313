#include "tresca/constants.hpp"

#include <doctest.h>

#include <Eigen/Eigenvalues>

#include <cmath>

using namespace tresca;

namespace {

Discretization square(int resolution) {
  ChannelDomain dom;
  dom.dim = 2;
  dom.lower = Vec::Zero(1);
  dom.upper = Vec::Ones(1);
  dom.height = [](const Vec&) { return 1.0; };
  dom.resolution = resolution;
  return Discretization(build_mesh(dom), 4);
}

double dense_largest(const SparseMatrix& B, const SparseMatrix& A) {
  const Eigen::MatrixXd Bd(B), Ad(A);
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(Bd, Ad);
  return es.eigenvalues().maxCoeff();
}

}  // namespace

TEST_CASE("subspace iteration matches a dense generalized eigensolver") {
  const Discretization disc = square(4);
  const VelocityForms vf = velocity_forms(disc);
  const TemperatureForms tf = temperature_forms(disc);
  auto check = [](const SparseMatrix& B, const SparseMatrix& A) {
    const GeneralizedEigen g = largest_generalized_eigenvalue(B, A);
    CHECK(g.value == doctest::Approx(dense_largest(B, A)).epsilon(1e-8));
    CHECK(g.vector.dot(A * g.vector) == doctest::Approx(1.0));
  };
  check(vf.grad, vf.strain);
  check(vf.mass, vf.grad);
  check(tf.mass, tf.stiffness);
  check(tf.gamma0, tf.stiffness);
}

TEST_CASE("Korn constant against the dense oracle on two levels") {
  for (int res : {4, 8}) {
    const Discretization disc = square(res);
    const VelocityForms vf = velocity_forms(disc);
    const double oracle = 1.0 / std::sqrt(dense_largest(vf.grad, vf.strain));
    const EstimateConstants c = estimate_constants(disc, 2.0, 1.25);
    CHECK(std::abs(c.korn - oracle) <= 0.1 * oracle);
  }
}

TEST_CASE("estimated constants") {
  const Discretization coarse = square(4);
  const Discretization fine = square(8);
  for (double p : {1.6, 2.0, 3.0}) {
    const EstimateConstants c = estimate_constants(coarse, p, 1.25);
    CHECK(c.korn > 0.0);
    CHECK(c.poincare_p > 0.0);
    CHECK(c.poincare_2 > 0.0);
    CHECK(c.trace > 0.0);
    CHECK(c.embedding_q > 0.0);
    CHECK_FALSE(c.certified);
    CHECK(c.omega_measure == doctest::Approx(1.0));
    CHECK(c.gamma0_measure == doctest::Approx(1.0));
    const EstimateConstants f = estimate_constants(fine, p, 1.25);
    CHECK(f.korn <= 1.05 * c.korn);

    const EstimateConstants again = estimate_constants(coarse, p, 1.25);
    CHECK(again.korn == c.korn);
    CHECK(again.embedding_q == c.embedding_q);
  }
}

TEST_CASE("with_data copies the material constants") {
  ProblemConfig config;
  config.viscosity = ViscosityModel::shear_thickening(0.25, 3.0, 1.0);
  config.k0 = 0.7;
  const EstimateConstants c = with_data(EstimateConstants{}, config);
  CHECK(c.mu0 == 0.25);
  CHECK(c.mu1 == 3.0);
  CHECK(c.k0 == 0.7);
}
