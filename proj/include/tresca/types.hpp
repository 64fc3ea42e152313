#pragma once

#include <Eigen/Dense>

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace tresca {

/// Small vectors and matrices in physical space (d = 2 or 3). Storage is
/// inline, so these never allocate.
using Vec = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, 3, 1>;
using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, 3, 3>;

using ScalarFn = std::function<double(const Vec&)>;
using VectorFn = std::function<Vec(const Vec&)>;

enum class Execution { serial, parallel };

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A checked invariant failed (bound, complementarity, coercivity...).
class InvariantViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A nonlinear or linear solve did not converge.
class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& what, std::vector<double> history = {})
      : std::runtime_error(what), history_(std::move(history)) {}
  const std::vector<double>& history() const { return history_; }

 private:
  std::vector<double> history_;
};

/// Configuration rejected; `label` is one of the data-assumption tags
/// such as "(mlo)" or "(compa1)".
class ValidationError : public std::runtime_error {
 public:
  ValidationError(std::string label, const std::string& detail)
      : std::runtime_error(label + " violated: " + detail), label_(std::move(label)) {}
  const std::string& label() const { return label_; }

 private:
  std::string label_;
};

inline Vec zero_vec(int d) { return Vec::Zero(d); }

}  // namespace tresca
