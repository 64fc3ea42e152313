#include "tresca/constitutive.hpp"

#include <algorithm>
#include <cmath>

namespace tresca {

namespace {

void require_p(double p) {
  if (!(p > 1.0)) throw DomainError("power-law index p must exceed 1");
}

// |D|^{p-2} D with the zero branch at D = 0.
SymTensor power_law(double p, const SymTensor& D) {
  const double n = frobenius(D);
  if (n == 0.0) return SymTensor::Zero(D.rows(), D.cols());
  return std::pow(n, p - 2.0) * D;
}

double shear_fraction(double a, double d) {
  const double da = std::pow(d, a);
  if (!std::isfinite(da)) return 1.0;
  return da / (1.0 + da);
}

}  // namespace

ViscosityModel ViscosityModel::constant(double value) {
  if (!(value > 0.0) || !std::isfinite(value))
    throw ValidationError("(mlo)", "constant viscosity must be positive and finite");
  ViscosityModel m;
  m.kind_ = Kind::constant;
  m.mu0_ = m.mu1_ = value;
  return m;
}

ViscosityModel ViscosityModel::shear_thickening(double mu0, double mu1, double a) {
  if (!(mu0 > 0.0)) throw ValidationError("(mlo)", "mu0 <= 0");
  if (!(mu1 >= mu0) || !std::isfinite(mu1)) throw ValidationError("(mlo)", "mu1 < mu0");
  if (!(a >= 1.0) || !std::isfinite(a)) throw ValidationError("(m5)", "shape exponent a < 1");
  ViscosityModel m;
  m.kind_ = Kind::shear_thickening;
  m.mu0_ = mu0;
  m.mu1_ = mu1;
  m.a_ = a;
  return m;
}

ViscosityModel ViscosityModel::temperature_coupled(double mu0, double mu1, double a, double beta,
                                                   double base) {
  if (!(mu0 > 0.0)) throw ValidationError("(mlo)", "mu0 <= 0");
  if (!(mu1 >= mu0) || !std::isfinite(mu1)) throw ValidationError("(mlo)", "mu1 < mu0");
  if (!(a >= 1.0) || !std::isfinite(a)) throw ValidationError("(m5)", "shape exponent a < 1");
  if (!(base >= 0.0 && base <= 1.0)) throw ValidationError("(m5)", "base fraction outside [0, 1]");
  if (!(beta >= 0.0) || !std::isfinite(beta))
    throw ValidationError("(mlo)", "temperature sensitivity beta < 0");
  ViscosityModel m;
  m.kind_ = Kind::temperature_coupled;
  m.mu0_ = mu0;
  m.mu1_ = mu1;
  m.a_ = a;
  m.beta_ = beta;
  m.base_ = base;
  return m;
}

std::string ViscosityModel::name() const {
  switch (kind_) {
    case Kind::constant: return "constant";
    case Kind::shear_thickening: return "shear_thickening";
    case Kind::temperature_coupled: return "temperature_coupled";
  }
  return "unknown";
}

double ViscosityModel::value(double theta, double d) const {
  switch (kind_) {
    case Kind::constant:
      return mu0_;
    case Kind::shear_thickening:
      return mu0_ + (mu1_ - mu0_) * shear_fraction(a_, d);
    case Kind::temperature_coupled: {
      const double s = base_ + (1.0 - base_) * shear_fraction(a_, d);
      return mu0_ + (mu1_ - mu0_) * s / (1.0 + beta_ * theta * theta);
    }
  }
  return mu0_;
}

double ViscosityModel::derivative(double theta, double d) const {
  if (kind_ == Kind::constant) return 0.0;
  const double da = std::pow(d, a_);
  if (!std::isfinite(da)) return 0.0;
  const double slope = a_ * std::pow(d, a_ - 1.0) / ((1.0 + da) * (1.0 + da));
  if (kind_ == Kind::shear_thickening) return (mu1_ - mu0_) * slope;
  return (mu1_ - mu0_) * (1.0 - base_) * slope / (1.0 + beta_ * theta * theta);
}

double eval_viscosity(const ViscosityModel& model, double theta, const Vec& /*u*/, double d) {
  if (!(d >= 0.0)) throw DomainError("strain modulus must be nonnegative");
  return model.value(theta, d);
}

SymTensor eval_F(const ViscosityModel& model, double p, double theta, const Vec& u,
                 const SymTensor& D) {
  require_p(p);
  const double n = frobenius(D);
  if (n == 0.0) return SymTensor::Zero(D.rows(), D.cols());
  return 2.0 * eval_viscosity(model, theta, u, n) * std::pow(n, p - 2.0) * D;
}

double monotonicity_gap(const ViscosityModel& model, double p, double theta, const Vec& u,
                        const SymTensor& D, const SymTensor& Dp) {
  return contract(eval_F(model, p, theta, u, D) - eval_F(model, p, theta, u, Dp), D - Dp);
}

StrongMonotonicity strong_monotonicity_check(double p, const SymTensor& D, const SymTensor& Dp,
                                             double rel_tol) {
  require_p(p);
  const double bracket = contract(power_law(p, D) - power_law(p, Dp), D - Dp);
  const double diff = frobenius(D - Dp);
  StrongMonotonicity r;
  if (p >= 2.0) {
    r.lhs = bracket;
    r.rhs = std::pow(2.0, 1.0 - p) * std::pow(diff, p);
  } else {
    const double sum = frobenius(D) + frobenius(Dp);
    r.lhs = sum == 0.0 ? 0.0 : std::pow(sum, 2.0 - p) * bracket;
    r.rhs = (p - 1.0) * diff * diff;
  }
  const double slack = std::max(rel_tol * std::max(std::abs(r.lhs), std::abs(r.rhs)), 1e-14);
  r.holds = r.lhs >= r.rhs - slack;
  return r;
}

double eval_g_delta(const ViscosityModel& model, double p, double theta, const Vec& u,
                    const SymTensor& D_total, double delta) {
  if (!(delta > 0.0)) throw DomainError("regularization delta must be positive");
  require_p(p);
  const double n = frobenius(D_total);
  if (n == 0.0) return 0.0;
  const double x = 2.0 * eval_viscosity(model, theta, u, n) * std::pow(n, p);
  if (!std::isfinite(x)) return 1.0 / delta;
  return x / (1.0 + delta * x);
}

double eval_theta_b_delta(double theta_b, double delta) {
  if (!(delta >= 0.0)) throw DomainError("regularization delta must be nonnegative");
  return theta_b / (1.0 + delta * std::abs(theta_b));
}

// ---------------------------------------------------------------------------

TensorSampler::TensorSampler(int dim, std::uint64_t seed) : dim_(dim), engine_(seed) {}

double TensorSampler::uniform(double lo, double hi) {
  std::uniform_real_distribution<double> dist(lo, hi);
  return dist(engine_);
}

Vec TensorSampler::uniform_vec(double lo, double hi) {
  Vec v(dim_);
  for (int i = 0; i < dim_; ++i) v(i) = uniform(lo, hi);
  return v;
}

SymTensor TensorSampler::next() {
  static constexpr double magnitudes[] = {1e-6, 1.0, 1e3};
  Mat a(dim_, dim_);
  for (int i = 0; i < dim_; ++i)
    for (int j = 0; j < dim_; ++j) a(i, j) = uniform(-1.0, 1.0);
  std::uniform_int_distribution<int> pick(0, 2);
  return magnitudes[pick(engine_)] * sym(a);
}

namespace {

void record(SampleStats& s, double normalized_slack, double tol) {
  ++s.samples;
  s.worst = std::min(s.worst, normalized_slack);
  if (normalized_slack < -tol) ++s.failures;
}

}  // namespace

SampleStats sample_monotonicity(const ViscosityModel& model, double p, int dim,
                                std::size_t count, std::uint64_t seed, double rel_tol) {
  TensorSampler rng(dim, seed);
  SampleStats stats;
  for (std::size_t i = 0; i < count; ++i) {
    const double theta = rng.uniform(-5.0, 5.0);
    const Vec u = rng.uniform_vec(-1.0, 1.0);
    const SymTensor D = rng.next();
    const SymTensor Dp = rng.next();
    const double gap = monotonicity_gap(model, p, theta, u, D, Dp);
    const double scale = (frobenius(eval_F(model, p, theta, u, D)) +
                          frobenius(eval_F(model, p, theta, u, Dp))) *
                         (frobenius(D) + frobenius(Dp));
    record(stats, scale > 0.0 ? gap / scale : 0.0, rel_tol);
  }
  return stats;
}

SampleStats sample_strong_monotonicity(double p, int dim, std::size_t count,
                                       std::uint64_t seed, double rel_tol) {
  TensorSampler rng(dim, seed);
  SampleStats stats;
  for (std::size_t i = 0; i < count; ++i) {
    const SymTensor D = rng.next();
    const SymTensor Dp = rng.next();
    const auto r = strong_monotonicity_check(p, D, Dp, rel_tol);
    const double scale = std::max({std::abs(r.lhs), std::abs(r.rhs), 1e-300});
    ++stats.samples;
    stats.worst = std::min(stats.worst, (r.lhs - r.rhs) / scale);
    if (!r.holds) ++stats.failures;
  }
  return stats;
}

SampleStats sample_F_bound(const ViscosityModel& model, double p, int dim, std::size_t count,
                           std::uint64_t seed) {
  TensorSampler rng(dim, seed);
  SampleStats stats;
  for (std::size_t i = 0; i < count; ++i) {
    const double theta = rng.uniform(-5.0, 5.0);
    const Vec u = rng.uniform_vec(-1.0, 1.0);
    const SymTensor D = rng.next();
    const double bound = 2.0 * model.mu1() * std::pow(frobenius(D), p - 1.0);
    const double value = frobenius(eval_F(model, p, theta, u, D));
    record(stats, bound > 0.0 ? (bound - value) / bound : 0.0, 1e-12);
  }
  return stats;
}

SampleStats sample_g_delta_sandwich(const ViscosityModel& model, double p, int dim,
                                    std::size_t count, std::uint64_t seed) {
  TensorSampler rng(dim, seed);
  SampleStats stats;
  static constexpr double deltas[] = {1e-6, 1e-3, 1e-1, 1.0, 10.0};
  for (std::size_t i = 0; i < count; ++i) {
    const double theta = rng.uniform(-5.0, 5.0);
    const Vec u = rng.uniform_vec(-1.0, 1.0);
    const SymTensor D = rng.next();
    const double delta = deltas[i % 5];
    const double g = eval_g_delta(model, p, theta, u, D, delta);
    const double upper = std::min(1.0 / delta, 2.0 * model.mu1() * std::pow(frobenius(D), p));
    double slack = upper > 0.0 ? (upper - g) / upper : -g;
    if (g < 0.0) slack = std::min(slack, g);
    record(stats, slack, 1e-12);
  }
  return stats;
}

}  // namespace tresca
