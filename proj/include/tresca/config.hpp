#pragma once

#include "tresca/assembly.hpp"
#include "tresca/constitutive.hpp"
#include "tresca/expression.hpp"
#include "tresca/mesh.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace tresca {

/// Malformed configuration (bad JSON, missing field, bad expression,
/// impossible geometry). Assumption violations use ValidationError.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SolverSettings {
  double tol_flow = 1e-9;    ///< Newton residual, relative to the load
  double tol_uzawa = 1e-8;   ///< multiplier increment, relative to max(1, |lambda|)
  double tol_div = 1e-9;
  double tol_fp = 1e-8;      ///< fixed-point metric, relative to the problem scale
  double tol_heat = 1e-12;
  int max_newton = 60;
  int max_uzawa = 400;
  int max_fp = 60;
  int min_fp = 2;
  double rho_factor = 100.0;  ///< augmented-Lagrangian step = rho_factor * 2 mu1 / h
  double relaxation = 1.0;    ///< Picard relaxation omega in (0, 1]
  double eps_reg = 1e-8;      ///< strain regularization, times the velocity scale
  int quadrature_degree = 0;  ///< 0 selects max(4, ceil(p) + 1)
};

struct ProblemConfig {
  int dim = 2;
  Vec lower, upper;
  Expression height = Expression::constant(1.0);
  int resolution = 8;
  double p = 2.0;
  double q = 1.25;
  ViscosityModel viscosity = ViscosityModel::constant(1.0);
  std::vector<Expression> f, G, s;
  std::optional<std::vector<Expression>> g;  ///< boundary data; defaults to G
  Expression k;
  Mat K;
  double k0 = 1.0;
  HeatSource r;
  Expression theta_b;
  SolverSettings solver;
  std::vector<int> schedule = {1, 2, 4, 8, 16, 32, 64, 128, 256, 512, 1024};
  std::uint64_t seed = 0;
  nlohmann::json source;  ///< the parsed document, used for hashing

  ChannelDomain domain() const;
  int quadrature_degree() const;
  VectorFn f_fn() const;
  VectorFn G_fn() const;
  VectorFn s_fn() const;
  ScalarFn k_fn() const;
  ScalarFn theta_b_fn() const;
};

/// Reads and validates a JSON file; throws ConfigError or ValidationError.
ProblemConfig parse_config(const std::string& path);
ProblemConfig parse_config_json(const nlohmann::json& doc);

/// Data-assumption checks on a parsed config; throws ValidationError whose
/// label is one of (eqG) (eqfk) (sdf) (rop) (m5) (mlo) (TEM2) (TEM2bis) (Cr)
/// (thetab) (compa1) (compa2).
void validate_config(const ProblemConfig& config);

/// (compa1)/(compa2) on their own.
void validate_exponents(double p, double q);

/// 64-bit FNV-1a of the canonical (sorted-key) JSON text, as 16 hex digits.
std::string config_hash(const ProblemConfig& config);
std::string fnv1a_hex(const std::string& bytes);

}  // namespace tresca
