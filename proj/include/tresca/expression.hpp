#pragma once

#include "tresca/types.hpp"

#include <memory>
#include <string>

namespace tresca {

/// Compiled arithmetic expression over coordinates x1..x3.
///
/// Grammar: numbers, `pi`, x1 x2 x3, unary +/-, binary + - * / ^ (right
/// associative), parentheses, and the functions sin cos exp tanh abs sqrt log.
class Expression {
 public:
  Expression();  // the constant 0
  static Expression parse(const std::string& source, int dim);
  static Expression constant(double value);

  double operator()(const Vec& x) const;
  const std::string& source() const { return source_; }
  bool is_constant() const;

  struct Node;

 private:
  std::shared_ptr<const Node> root_;
  std::string source_;
};

/// Parse error with the offending position.
class ExpressionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace tresca
