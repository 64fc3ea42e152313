#include "tresca/constitutive.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>

using namespace tresca;

namespace {

SymTensor eye(int d) { return SymTensor::Identity(d, d); }
Vec origin(int d) { return Vec::Zero(d); }

}  // namespace

TEST_CASE("viscosity evaluation") {
  const auto c = ViscosityModel::constant(1.0);
  CHECK(eval_viscosity(c, 3.0, origin(3), 7.0) == 1.0);

  const auto st = ViscosityModel::shear_thickening(1.0, 2.0, 1.0);
  CHECK(eval_viscosity(st, 0.0, origin(2), 0.0) == doctest::Approx(1.0));
  CHECK(eval_viscosity(st, 0.0, origin(2), 1.0) == doctest::Approx(1.5));
  CHECK_THROWS_AS(eval_viscosity(st, 0.0, origin(2), -1.0), DomainError);

  const auto tc = ViscosityModel::temperature_coupled(0.5, 2.0, 1.5, 0.3, 0.2);
  double prev = 0.0;
  for (double d = 0.0; d < 50.0; d += 0.25) {
    const double mu = eval_viscosity(tc, 1.7, origin(2), d);
    CHECK(mu >= 0.5);
    CHECK(mu <= 2.0);
    CHECK(mu >= prev);
    prev = mu;
  }
}

TEST_CASE("viscosity derivative matches differences") {
  const auto tc = ViscosityModel::temperature_coupled(0.5, 2.0, 1.5, 0.3, 0.2);
  for (double d : {0.1, 0.7, 2.0, 9.0}) {
    const double h = 1e-6 * d;
    const double fd = (tc.value(0.4, d + h) - tc.value(0.4, d - h)) / (2 * h);
    CHECK(tc.derivative(0.4, d) == doctest::Approx(fd).epsilon(1e-6));
  }
}

TEST_CASE("viscosity factories reject bad parameters") {
  auto label_of = [](auto&& make) {
    try {
      make();
    } catch (const ValidationError& e) {
      return e.label();
    }
    return std::string("none");
  };
  CHECK(label_of([] { ViscosityModel::shear_thickening(2.0, 1.0, 1.0); }) == "(mlo)");
  CHECK(label_of([] { ViscosityModel::shear_thickening(0.0, 1.0, 1.0); }) == "(mlo)");
  CHECK(label_of([] { ViscosityModel::shear_thickening(1.0, 2.0, 0.5); }) == "(m5)");
  CHECK(label_of([] { ViscosityModel::constant(-1.0); }) == "(mlo)");
  CHECK(label_of([] { ViscosityModel::temperature_coupled(1.0, 2.0, 1.0, 0.1, 1.5); }) == "(m5)");
}

TEST_CASE("eval_F examples") {
  const auto c = ViscosityModel::constant(1.0);
  CHECK(eval_F(c, 1.5, 0.0, origin(3), SymTensor::Zero(3, 3)).norm() == 0.0);
  CHECK((eval_F(c, 2.0, 0.0, origin(3), eye(3)) - 2.0 * eye(3)).norm() < 1e-14);
  SymTensor D(3, 3);
  D << 1, 1, 0, 1, 0, 1, 0, 1, -1;
  D *= 2.0 / D.norm();
  CHECK((eval_F(c, 3.0, 0.0, origin(3), D) - 4.0 * D).norm() < 1e-13);
}

TEST_CASE("F is continuous at the origin") {
  const auto c = ViscosityModel::constant(1.0);
  TensorSampler sampler(3, 11);
  for (int ray = 0; ray < 10; ++ray) {
    SymTensor D = sampler.next();
    D /= D.norm();
    for (double p : {1.1, 1.5, 3.0}) {
      double prev = std::numeric_limits<double>::infinity();
      for (double t = 1.0; t > 1e-100; t *= 0.1) {
        const double n = eval_F(c, p, 0.0, origin(3), t * D).norm();
        CHECK(n <= prev);
        prev = n;
      }
      CHECK(prev < 1e-3);
    }
  }
}

TEST_CASE("monotonicity gap examples") {
  const auto st = ViscosityModel::shear_thickening(1.0, 2.0, 1.0);
  SymTensor D = eye(2);
  D(0, 1) = D(1, 0) = 0.3;
  CHECK(monotonicity_gap(st, 2.5, 0.0, origin(2), D, D) == 0.0);
  const double n = D.norm();
  const double expected = 2.0 * st.value(0.0, n) * std::pow(n, 2.5);
  CHECK(monotonicity_gap(st, 2.5, 0.0, origin(2), D, SymTensor::Zero(2, 2)) ==
        doctest::Approx(expected).epsilon(1e-13));
}

TEST_CASE("strong monotonicity examples") {
  const SymTensor I = eye(3);
  const SymTensor Z = SymTensor::Zero(3, 3);
  const auto r4 = strong_monotonicity_check(4.0, I, Z);
  CHECK(r4.lhs == doctest::Approx(9.0));
  CHECK(r4.rhs == doctest::Approx(9.0 / 8.0));
  CHECK(r4.holds);
  const auto r15 = strong_monotonicity_check(1.5, I, Z);
  CHECK(r15.lhs == doctest::Approx(3.0));
  CHECK(r15.rhs == doctest::Approx(1.5));
  CHECK(r15.holds);

  TensorSampler sampler(3, 5);
  const SymTensor A = sampler.next(), B = sampler.next();
  const auto r2 = strong_monotonicity_check(2.0, A, B);
  CHECK(r2.lhs == doctest::Approx((A - B).squaredNorm()));
  CHECK(r2.rhs == doctest::Approx(0.5 * (A - B).squaredNorm()));
  CHECK_THROWS_AS(strong_monotonicity_check(1.0, A, B), DomainError);
}

TEST_CASE("g_delta and theta_b_delta examples") {
  const auto c = ViscosityModel::constant(1.0);
  CHECK(eval_g_delta(c, 2.0, 0.0, origin(2), SymTensor::Zero(2, 2), 1.0) == 0.0);
  SymTensor D = SymTensor::Zero(2, 2);
  D(0, 1) = D(1, 0) = std::sqrt(0.5);  // |D| = 1
  CHECK(eval_g_delta(c, 2.0, 0.0, origin(2), D, 1.0) == doctest::Approx(2.0 / 3.0));
  double prev = 0.0;
  for (double t = 1.0; t < 1e8; t *= 10.0) {
    const double g = eval_g_delta(c, 2.0, 0.0, origin(2), t * D, 0.5);
    CHECK(g < 2.0);
    CHECK(g > prev);
    prev = g;
  }
  CHECK(prev == doctest::Approx(2.0).epsilon(1e-12));
  CHECK_THROWS_AS(eval_g_delta(c, 2.0, 0.0, origin(2), D, 0.0), DomainError);

  CHECK(eval_theta_b_delta(0.0, 0.3) == 0.0);
  CHECK(eval_theta_b_delta(-1.7, 0.0) == -1.7);
  CHECK(eval_theta_b_delta(2.0, 0.5) == doctest::Approx(1.0));
  for (double tb : {-5.0, -0.1, 0.2, 30.0})
    for (double delta : {0.01, 1.0, 10.0})
      CHECK(std::abs(eval_theta_b_delta(tb, delta)) <= std::min(std::abs(tb), 1.0 / delta));
}

TEST_CASE("sampling oracles pass on shipped models") {
  const std::vector<ViscosityModel> models{ViscosityModel::constant(1.0),
                                           ViscosityModel::shear_thickening(0.5, 2.0, 1.5),
                                           ViscosityModel::temperature_coupled(0.5, 2.0, 1.0, 0.3, 0.2)};
  std::uint64_t seed = 100;
  for (const auto& m : models)
    for (double p : {1.2, 2.0, 4.0, 6.0}) {
      CHECK(sample_monotonicity(m, p, 3, 2000, ++seed).passed());
      CHECK(sample_F_bound(m, p, 2, 2000, ++seed).passed());
      CHECK(sample_g_delta_sandwich(m, p, 3, 2000, ++seed).passed());
    }
  for (double p : {1.2, 1.5, 1.8, 2.0, 2.5, 3.0, 4.0})
    CHECK(sample_strong_monotonicity(p, 3, 2000, ++seed, 1e-10).passed());
}

TEST_CASE("sampling is reproducible") {
  const auto m = ViscosityModel::shear_thickening(0.5, 2.0, 1.5);
  const SampleStats a = sample_monotonicity(m, 1.5, 2, 500, 9);
  const SampleStats b = sample_monotonicity(m, 1.5, 2, 500, 9);
  CHECK(a.worst == b.worst);
  CHECK(a.samples == 500);
}
