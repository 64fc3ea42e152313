#include "tresca/mms.hpp"

#include "tresca/flow_solver.hpp"
#include "tresca/heat_solver.hpp"

#include <cmath>
#include <numbers>

namespace tresca {

namespace {

constexpr double kPi = std::numbers::pi;

ChannelDomain unit_square(int resolution) {
  ChannelDomain dom;
  dom.dim = 2;
  dom.lower = Vec::Constant(1, 0.0);
  dom.upper = Vec::Constant(1, 1.0);
  dom.height = [](const Vec&) { return 1.0; };
  dom.resolution = resolution;
  return dom;
}

// theta = sin(pi x) (1 - y^2): zero on y = 1 and x = 0, 1, zero flux on y = 0.
Vec heat_exact_grad(const Vec& x) {
  Vec g(2);
  g << kPi * std::cos(kPi * x(0)) * (1.0 - x(1) * x(1)), -2.0 * x(1) * std::sin(kPi * x(0));
  return g;
}
double heat_forcing(const Vec& x) {
  return std::sin(kPi * x(0)) * (kPi * kPi * (1.0 - x(1) * x(1)) + 2.0);
}

double heat_error(int resolution, Execution exec) {
  const Discretization disc(build_mesh(unit_square(resolution)), 4);
  HeatData data;
  data.K = Mat::Identity(2, 2);
  HeatSolver solver(disc, data);
  solver.set_velocity(Eigen::VectorXd::Zero(disc.velocity_size()), exec);
  const Mesh& mesh = disc.mesh();
  Eigen::VectorXd load = Eigen::VectorXd::Zero(disc.num_temperature_free());
  for (std::size_t c = 0; c < mesh.num_cells(); ++c)
    for (std::size_t q = 0; q < disc.shapes().rule.size(); ++q) {
      const double fw = heat_forcing(disc.quadrature_point(c, q)) * disc.quadrature_weight(c, q);
      for (int i = 0; i <= 2; ++i) {
        const int idx = disc.temperature_free()[mesh.cell(c)[i]];
        if (idx >= 0) load(idx) += fw * disc.shapes().rule.barycentric[q](i);
      }
    }
  const Eigen::VectorXd theta = disc.extend_temperature(solver.solve_free(load));
  double err = 0.0;
  for_each_p1_sample(disc, theta, [&](const ScalarSample& s) {
    err += s.weight * (s.grad - heat_exact_grad(s.x)).squaredNorm();
  });
  return std::sqrt(err);
}

// Stream-function velocity u = (a phi', -a' phi), a = x^2 (1-x)^2,
// phi = y (1-y)^2: divergence free, zero on y = 1 and x = 0, 1, tangential
// value (a, 0) on y = 0.
struct FlowExact {
  static double a(double x) { return x * x * (1 - x) * (1 - x); }
  static double a1(double x) { return 2 * x * (1 - x) * (1 - 2 * x); }
  static double a2(double x) { return 2 * (1 - 6 * x + 6 * x * x); }
  static double f0(double y) { return y * (1 - y) * (1 - y); }
  static double f1(double y) { return 1 - 4 * y + 3 * y * y; }
  static double f2(double y) { return -4 + 6 * y; }

  static Vec velocity(const Vec& x) {
    Vec u(2);
    u << a(x(0)) * f1(x(1)), -a1(x(0)) * f0(x(1));
    return u;
  }
  static Mat grad(const Vec& x) {
    Mat g(2, 2);
    g << a1(x(0)) * f1(x(1)), a(x(0)) * f2(x(1)), -a2(x(0)) * f0(x(1)), -a1(x(0)) * f1(x(1));
    return g;
  }
};

Mat flow_stress(const Vec& x, double p) {
  const SymTensor D = sym(FlowExact::grad(x));
  const double n = frobenius(D);
  if (n == 0.0) return Mat::Zero(2, 2);
  return 2.0 * std::pow(n, p - 2.0) * D;
}

// f = -div sigma + grad pi with pi = x - 1/2; fourth-order central differences.
Vec flow_forcing(const Vec& x, double p) {
  const double h = 1e-3;
  Vec f(2);
  f << 1.0, 0.0;
  for (int j = 0; j < 2; ++j) {
    auto at = [&](double t) {
      Vec y = x;
      y(j) += t;
      return flow_stress(y, p);
    };
    const Mat dsig = (-at(2 * h) + 8.0 * at(h) - 8.0 * at(-h) + at(-2 * h)) / (12.0 * h);
    for (int i = 0; i < 2; ++i) f(i) -= dsig(i, j);
  }
  return f;
}

double flow_error(int resolution, double p, Execution exec) {
  const int degree = std::max(4, static_cast<int>(std::ceil(p)) + 1);
  const Discretization disc(build_mesh(unit_square(resolution)), degree);
  FlowData data;
  data.model = ViscosityModel::constant(1.0);
  data.p = p;
  data.f = [p](const Vec& x) { return flow_forcing(x, p); };
  data.s = [](const Vec& x) {
    Vec s(2);
    s << FlowExact::a(x(0)), 0.0;
    return s;
  };
  data.k = [](const Vec&) { return 1e8; };
  const FlowProblem problem(disc, data);
  const FlowState st = solve_flow_vi(problem, Eigen::VectorXd::Zero(disc.num_vertices()),
                                     Eigen::VectorXd::Zero(disc.velocity_size()), nullptr, exec);
  double err = 0.0;
  for_each_velocity_sample(disc, st.velocity, [&](const VelocitySample& s) {
    err += s.weight * std::pow((s.grad - FlowExact::grad(s.x)).norm(), p);
  });
  return std::pow(err, 1.0 / p);
}

}  // namespace

const std::vector<std::string>& mms_cases() {
  static const std::vector<std::string> names{"heat", "stokes_p2", "plap_p1.5", "plap_p3"};
  return names;
}

MmsResult run_mms(const std::string& name, int levels, int base_resolution, Execution exec) {
  if (levels < 2) throw DomainError("a convergence study needs at least two levels");
  if (base_resolution < 1) throw DomainError("base resolution must be positive");
  MmsResult res;
  res.name = name;
  if (name == "heat") {
    res.required_order = 0.9;
  } else if (name == "stokes_p2") {
    res.required_order = 1.8;
  } else if (name == "plap_p1.5") {
    res.p = 1.5;
    res.required_order = 0.5;
    res.require_decrease = true;
  } else if (name == "plap_p3") {
    res.p = 3.0;
    res.required_order = 0.5;
    res.require_decrease = true;
  } else {
    throw DomainError("unknown manufactured-solution case '" + name + "'");
  }
  for (int l = 0; l < levels; ++l) {
    MmsLevel lev;
    lev.resolution = base_resolution << l;
    lev.h = std::sqrt(2.0) / lev.resolution;
    lev.error = name == "heat" ? heat_error(lev.resolution, exec)
                               : flow_error(lev.resolution, res.p, exec);
    res.levels.push_back(lev);
  }
  res.passed = true;
  for (std::size_t i = 1; i < res.levels.size(); ++i) {
    const auto& a = res.levels[i - 1];
    const auto& b = res.levels[i];
    const double order = std::log(a.error / b.error) / std::log(a.h / b.h);
    res.orders.push_back(order);
    if (!(order >= res.required_order)) res.passed = false;
    if (res.require_decrease && !(b.error < a.error)) res.passed = false;
  }
  return res;
}

}  // namespace tresca
