#include "tresca/expression.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <numbers>
#include <vector>

namespace tresca {

struct Expression::Node {
  enum class Op { number, coord, neg, add, sub, mul, div, pow, call };
  Op op = Op::number;
  double value = 0.0;
  int index = 0;
  double (*fn)(double) = nullptr;
  std::shared_ptr<const Node> lhs, rhs;

  double eval(const Vec& x) const {
    switch (op) {
      case Op::number: return value;
      case Op::coord: return x(index);
      case Op::neg: return -lhs->eval(x);
      case Op::add: return lhs->eval(x) + rhs->eval(x);
      case Op::sub: return lhs->eval(x) - rhs->eval(x);
      case Op::mul: return lhs->eval(x) * rhs->eval(x);
      case Op::div: return lhs->eval(x) / rhs->eval(x);
      case Op::pow: return std::pow(lhs->eval(x), rhs->eval(x));
      case Op::call: return fn(lhs->eval(x));
    }
    return 0.0;
  }
  bool constant() const {
    switch (op) {
      case Op::number: return true;
      case Op::coord: return false;
      case Op::neg:
      case Op::call: return lhs->constant();
      default: return lhs->constant() && rhs->constant();
    }
  }
};

namespace {

using NodePtr = std::shared_ptr<const Expression::Node>;
using Op = Expression::Node::Op;

NodePtr make(Op op, NodePtr lhs = nullptr, NodePtr rhs = nullptr) {
  auto n = std::make_shared<Expression::Node>();
  n->op = op;
  n->lhs = std::move(lhs);
  n->rhs = std::move(rhs);
  return n;
}

NodePtr number(double v) {
  auto n = std::make_shared<Expression::Node>();
  n->value = v;
  return n;
}

class Parser {
 public:
  Parser(const std::string& s, int dim) : s_(s), dim_(dim) {}

  NodePtr parse() {
    NodePtr n = expr();
    skip();
    if (pos_ != s_.size()) fail("unexpected trailing input");
    return n;
  }

 private:
  const std::string& s_;
  int dim_;
  std::size_t pos_ = 0;

  [[noreturn]] void fail(const std::string& msg) const {
    throw ExpressionError("expression '" + s_ + "': " + msg + " at position " +
                          std::to_string(pos_));
  }
  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool accept(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  NodePtr expr() {
    NodePtr n = term();
    for (;;) {
      if (accept('+')) n = make(Op::add, n, term());
      else if (accept('-')) n = make(Op::sub, n, term());
      else return n;
    }
  }
  NodePtr term() {
    NodePtr n = unary();
    for (;;) {
      if (accept('*')) n = make(Op::mul, n, unary());
      else if (accept('/')) n = make(Op::div, n, unary());
      else return n;
    }
  }
  NodePtr unary() {
    if (accept('-')) return make(Op::neg, unary());
    if (accept('+')) return unary();
    return power();
  }
  NodePtr power() {
    NodePtr base = primary();
    if (accept('^')) return make(Op::pow, base, unary());
    return base;
  }
  NodePtr primary() {
    skip();
    if (pos_ >= s_.size()) fail("unexpected end of input");
    if (accept('(')) {
      NodePtr n = expr();
      if (!accept(')')) fail("expected ')'");
      return n;
    }
    const char c = s_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      double v = 0.0;
      auto [end, ec] = std::from_chars(s_.data() + pos_, s_.data() + s_.size(), v);
      if (ec != std::errc()) fail("bad number");
      pos_ = static_cast<std::size_t>(end - s_.data());
      return number(v);
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      std::size_t start = pos_;
      while (pos_ < s_.size() && std::isalnum(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      const std::string id = s_.substr(start, pos_ - start);
      if (id == "pi") return number(std::numbers::pi);
      if (id.size() == 2 && id[0] == 'x' && id[1] >= '1' && id[1] <= '3') {
        const int k = id[1] - '1';
        if (k >= dim_) fail("coordinate " + id + " exceeds dimension");
        auto n = std::make_shared<Expression::Node>();
        n->op = Op::coord;
        n->index = k;
        return n;
      }
      double (*fn)(double) = nullptr;
      if (id == "sin") fn = [](double v) { return std::sin(v); };
      else if (id == "cos") fn = [](double v) { return std::cos(v); };
      else if (id == "exp") fn = [](double v) { return std::exp(v); };
      else if (id == "tanh") fn = [](double v) { return std::tanh(v); };
      else if (id == "abs") fn = [](double v) { return std::abs(v); };
      else if (id == "sqrt") fn = [](double v) { return std::sqrt(v); };
      else if (id == "log") fn = [](double v) { return std::log(v); };
      else fail("unknown identifier '" + id + "'");
      if (!accept('(')) fail("expected '(' after " + id);
      auto n = std::make_shared<Expression::Node>();
      n->op = Op::call;
      n->fn = fn;
      n->lhs = expr();
      if (!accept(')')) fail("expected ')'");
      return n;
    }
    fail(std::string("unexpected character '") + c + "'");
  }
};

}  // namespace

Expression::Expression() : root_(number(0.0)), source_("0") {}

Expression Expression::parse(const std::string& source, int dim) {
  Expression e;
  e.root_ = Parser(source, dim).parse();
  e.source_ = source;
  return e;
}

Expression Expression::constant(double value) {
  Expression e;
  e.root_ = number(value);
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value);
  e.source_.assign(buf, end);
  return e;
}

double Expression::operator()(const Vec& x) const { return root_->eval(x); }

bool Expression::is_constant() const { return root_->constant(); }

}  // namespace tresca
