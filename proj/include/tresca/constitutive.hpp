#pragma once

#include "tresca/types.hpp"

#include <cstdint>
#include <random>
#include <string>

namespace tresca {

/// Symmetric d x d strain-rate or stress tensor (d = 2 or 3). Symmetry is a
/// caller invariant; `sym()` builds one from an arbitrary square matrix.
using SymTensor = Mat;

inline SymTensor sym(const Mat& a) { return 0.5 * (a + a.transpose()); }
inline double frobenius(const Mat& a) { return a.norm(); }
inline double contract(const Mat& a, const Mat& b) { return a.cwiseProduct(b).sum(); }

/// Viscosity mu(theta, u, d) with 0 < mu0 <= mu <= mu1 and d -> mu
/// nondecreasing. The velocity slot is part of the signature but unused by
/// the shipped families.
class ViscosityModel {
 public:
  enum class Kind { constant, shear_thickening, temperature_coupled };

  /// mu == value.
  static ViscosityModel constant(double value);
  /// mu0 + (mu1 - mu0) d^a / (1 + d^a), a >= 1.
  static ViscosityModel shear_thickening(double mu0, double mu1, double a);
  /// mu0 + (mu1 - mu0) (base + d^a) / (1 + d^a) / (1 + beta theta^2),
  /// a >= 1, beta >= 0, base in [0, 1].
  static ViscosityModel temperature_coupled(double mu0, double mu1, double a, double beta,
                                            double base);

  Kind kind() const { return kind_; }
  double mu0() const { return mu0_; }
  double mu1() const { return mu1_; }
  double exponent() const { return a_; }
  double beta() const { return beta_; }
  double base() const { return base_; }
  std::string name() const;

  /// True when mu does not read theta (nor u).
  bool independent_of_state() const { return kind_ != Kind::temperature_coupled || beta_ == 0.0; }

  double value(double theta, double d) const;
  /// d mu / d d, used by the Newton Jacobian.
  double derivative(double theta, double d) const;

 private:
  ViscosityModel() = default;
  Kind kind_ = Kind::constant;
  double mu0_ = 1.0, mu1_ = 1.0, a_ = 1.0, beta_ = 0.0, base_ = 0.0;
};

double eval_viscosity(const ViscosityModel& model, double theta, const Vec& u, double d);

/// F(theta, u, D) = 2 mu(theta, u, |D|) |D|^{p-2} D, and 0 at D = 0.
SymTensor eval_F(const ViscosityModel& model, double p, double theta, const Vec& u,
                 const SymTensor& D);

/// (F(D) - F(D')) : (D - D'), nonnegative for admissible models.
double monotonicity_gap(const ViscosityModel& model, double p, double theta, const Vec& u,
                        const SymTensor& D, const SymTensor& Dp);

struct StrongMonotonicity {
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds = false;
};

/// p >= 2: (|D|^{p-2}D - |D'|^{p-2}D'):(D-D') >= 2^{1-p}|D-D'|^p.
/// 1 < p < 2: (|D|+|D'|)^{2-p} (same bracket) >= (p-1)|D-D'|^2.
/// `holds` allows a slack of rel_tol * max(|lhs|, |rhs|) with a 1e-14 floor.
StrongMonotonicity strong_monotonicity_check(double p, const SymTensor& D, const SymTensor& Dp,
                                             double rel_tol = 1e-12);

/// g_delta = 2 mu |D|^p / (1 + 2 delta mu |D|^p), in [0, 1/delta].
double eval_g_delta(const ViscosityModel& model, double p, double theta, const Vec& u,
                    const SymTensor& D_total, double delta);

/// theta_b / (1 + delta |theta_b|).
double eval_theta_b_delta(double theta_b, double delta);

// ---------------------------------------------------------------------------
// Random-sampling oracles for the pointwise inequalities.

struct SampleStats {
  std::size_t samples = 0;
  std::size_t failures = 0;
  /// Most negative normalized slack seen (>= -tol means pass).
  double worst = 0.0;
  bool passed() const { return failures == 0; }
};

/// Random symmetric tensor: entries uniform on [-1, 1], symmetrized, then
/// rescaled by a magnitude drawn from {1e-6, 1, 1e3}.
struct TensorSampler {
  explicit TensorSampler(int dim, std::uint64_t seed);
  SymTensor next();
  double uniform(double lo, double hi);
  Vec uniform_vec(double lo, double hi);

 private:
  int dim_;
  std::mt19937_64 engine_;
};

SampleStats sample_monotonicity(const ViscosityModel& model, double p, int dim,
                                std::size_t count, std::uint64_t seed, double rel_tol = 1e-12);
SampleStats sample_strong_monotonicity(double p, int dim, std::size_t count,
                                       std::uint64_t seed, double rel_tol = 1e-12);
/// |F| <= 2 mu1 |D|^{p-1}.
SampleStats sample_F_bound(const ViscosityModel& model, double p, int dim, std::size_t count,
                           std::uint64_t seed);
/// 0 <= g_delta <= min(1/delta, 2 mu1 |D|^p).
SampleStats sample_g_delta_sandwich(const ViscosityModel& model, double p, int dim,
                                    std::size_t count, std::uint64_t seed);

}  // namespace tresca
