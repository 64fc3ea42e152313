#include "tresca/exponents.hpp"
#include "tresca/types.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace tresca;

TEST_CASE("valid_q_range examples") {
  const auto w4 = valid_q_range(4.0);
  CHECK(w4.q_min == 1.0);
  CHECK(w4.q_min_included);
  CHECK(w4.q_max == 1.5);
  CHECK(w4.contains(1.0));
  CHECK_FALSE(w4.contains(1.5));

  const auto w3 = valid_q_range(3.0);
  CHECK(w3.q_min == 1.0);
  CHECK_FALSE(w3.q_min_included);
  CHECK_FALSE(w3.contains(1.0));
  CHECK(w3.contains(1.0001));

  const auto w2 = valid_q_range(2.0);
  CHECK(w2.q_min == doctest::Approx(1.2));
  CHECK(w2.q_min_included);
  CHECK(w2.contains(1.2));
  CHECK_FALSE(w2.contains(1.19));

  CHECK_THROWS_AS(valid_q_range(1.5), DomainError);
}

TEST_CASE("min_p_for_q examples") {
  const auto t1 = min_p_for_q(1.0);
  CHECK(t1.p == 3.0);
  CHECK(t1.strict);
  CHECK_FALSE(t1.admits(3.0));
  CHECK(t1.admits(3.000001));
  CHECK(min_p_for_q(1.2).p == doctest::Approx(2.0));
  CHECK_FALSE(min_p_for_q(1.2).strict);
  CHECK(min_p_for_q(1.4).p == doctest::Approx(4.2 / 2.6));
  CHECK_THROWS_AS(min_p_for_q(1.5), DomainError);
  CHECK_THROWS_AS(min_p_for_q(0.9), DomainError);
}

TEST_CASE("window and threshold agree") {
  for (int i = 1; i <= 400; ++i) {
    const double p = 1.5 + 4.5 * i / 400.0;
    const auto w = valid_q_range(p);
    for (int j = 0; j < 60; ++j) {
      const double q = 1.0 + 0.5 * j / 60.0;
      CHECK(w.contains(q) == min_p_for_q(q).admits(p));
    }
  }
  for (double t = 1.0; t < 10.0; t += 0.01)
    CHECK(compatibility_curve(t + 0.01) < compatibility_curve(t));
}

TEST_CASE("truncation exponents") {
  const auto e1 = truncation_exponents(1.0);
  CHECK(e1.zeta == doctest::Approx(0.5));
  CHECK(e1.q_star == doctest::Approx(1.5));
  CHECK(e1.rho == doctest::Approx(1.5));
  CHECK(e1.alpha == doctest::Approx(0.75));

  const auto e12 = truncation_exponents(1.2);
  CHECK(e12.zeta == doctest::Approx(1.0 / 3.0));
  CHECK(e12.q_star == doctest::Approx(2.0));
  CHECK(e12.alpha == doctest::Approx(2.0 / 3.0));

  CHECK_THROWS_AS(truncation_exponents(1.5), DomainError);
  CHECK_THROWS_AS(truncation_exponents(1.2, 0.5), DomainError);
  CHECK_THROWS_AS(truncation_exponents(1.2, 0.0), DomainError);

  for (double q = 1.0; q < 1.5; q += 0.01) {
    const auto d = truncation_exponents(q);
    CHECK(d.rho == d.q_star);
    CHECK(d.alpha > 0.0);
    CHECK(d.alpha < 1.0);
    const auto s = truncation_exponents(q, 0.5 * d.zeta);
    CHECK(s.rho < s.q_star);
    CHECK(s.alpha > 0.0);
    CHECK(s.alpha < 1.0);
  }
}

TEST_CASE("c_flow_bound") {
  EstimateConstants c;
  c.korn = 0.7;
  c.poincare_p = 0.4;
  c.mu0 = 0.5;
  c.mu1 = 2.0;

  SUBCASE("zero data gives zero") {
    const FlowBound b = c_flow_bound(c, 2.0, FlowDataNorms{});
    CHECK(b.t_star == 0.0);
    CHECK(flow_bound_lambda(c, 2.0, FlowDataNorms{}, 3.0) == doctest::Approx(-c.korn));
  }

  SUBCASE("root and negativity beyond it") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.0, 2.0);
    for (double p : {1.6, 2.0, 3.0, 4.5}) {
      const FlowDataNorms n{u(rng), u(rng), u(rng), u(rng)};
      const FlowBound b = c_flow_bound(c, p, n);
      CHECK(b.t_star > 0.0);
      CHECK(b.lambda_at_t_star <= 0.0);
      CHECK(flow_bound_lambda(c, p, n, b.t_star * (1.0 - 1e-6)) > 0.0);
      for (int i = 1; i <= 100; ++i)
        CHECK(flow_bound_lambda(c, p, n, b.t_star * std::pow(1.2, i)) <= 0.0);

      FlowDataNorms n2 = n;
      n2.f_norm *= 2.0;
      CHECK(c_flow_bound(c, p, n2).t_star >= b.t_star);
    }
  }

  SUBCASE("invalid input") {
    CHECK_THROWS_AS(c_flow_bound(c, 2.0, FlowDataNorms{-1.0, 0, 0, 0}), DomainError);
  }
}

TEST_CASE("c_heat_bound") {
  EstimateConstants c;
  c.k0 = 1.0;
  c.embedding_q = 1.3;
  c.omega_measure = 1.0;
  CHECK(c_heat_bound(c, 1.25, 0.0).bound == 1.0);
  CHECK(c_heat_bound(c, 1.0, 2.0).c1 == doctest::Approx(2.0));
  double prev = 0.0;
  for (double e = 0.0; e < 100.0; e += 0.5) {
    const double b = c_heat_bound(c, 1.25, e).bound;
    CHECK(b >= 1.0);
    CHECK(b >= prev);
    prev = b;
  }
  CHECK_THROWS_AS(c_heat_bound(c, 1.25, -1.0), DomainError);
}

TEST_CASE("r_delta_bound grows as delta shrinks") {
  EstimateConstants c;
  CHECK(r_delta_bound(c, 0.1, 0.2) > r_delta_bound(c, 1.0, 0.2));
  CHECK_THROWS_AS(r_delta_bound(c, 0.0, 0.2), DomainError);
}
