#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "halfspace/grid.hpp"

namespace halfspace {

enum class ExprKind {
  constant,
  variable,
  add,
  sub,
  mul,
  div,
  pow_int,
  sin_fn,
  cos_fn,
  atan_fn,
  exp_fn,
};

/// Syntax error from parse_expr. `offset` is the byte position in the input.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& message, std::size_t offset);
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

/// Runtime evaluation failure (division by zero). Carries the printed form of
/// the offending node and the evaluation point.
class EvalError : public std::runtime_error {
 public:
  EvalError(const std::string& message, std::string node_text, std::vector<double> point);
  const std::string& node_text() const { return node_text_; }
  const std::vector<double>& point() const { return point_; }

 private:
  std::string node_text_;
  std::vector<double> point_;
};

/// Immutable symbolic expression over x1..xk. The grammar is closed under
/// differentiation: constants, variables, +, -, *, /, integer powers and
/// sin, cos, atan, exp. Values are shared; copying is cheap and thread-safe.
class Expr {
 public:
  struct Node;  // defined in expr.cpp

  Expr();  // constant 0

  static Expr constant(double value);
  static Expr variable(int index);  // 0-based

  ExprKind kind() const;
  double constant_value() const;
  int variable_index() const;
  int exponent() const;
  Expr child(int which) const;  // 0 = lhs, 1 = rhs

  double eval(std::span<const double> point) const;
  Expr derivative(int axis) const;
  Expr simplified() const;
  std::string to_string() const;
  int max_variable_index() const;  // -1 when no variables occur

  /// Constant value when the (already folded) node is a literal constant.
  std::optional<double> literal_constant() const;

  bool structurally_equal(const Expr& other) const;

  bool is_literal_zero() const;
  bool is_literal(double v) const;

  friend Expr operator+(const Expr& a, const Expr& b);
  friend Expr operator-(const Expr& a, const Expr& b);
  friend Expr operator*(const Expr& a, const Expr& b);
  friend Expr operator/(const Expr& a, const Expr& b);
  friend Expr operator-(const Expr& a);

  friend Expr pow(const Expr& base, int exponent);
  friend Expr sin(const Expr& e);
  friend Expr cos(const Expr& e);
  friend Expr atan(const Expr& e);
  friend Expr exp(const Expr& e);

 private:
  explicit Expr(std::shared_ptr<const Node> node);
  std::shared_ptr<const Node> node_;
};

Expr pow(const Expr& base, int exponent);
Expr sin(const Expr& e);
Expr cos(const Expr& e);
Expr atan(const Expr& e);
Expr exp(const Expr& e);

/// Parses the published infix grammar. Precedence: ^ > unary minus > * / > + -.
/// Variables are named x1..x{n_vars}; calls are sin(e), cos(e), atan(e), exp(e).
Expr parse_expr(std::string_view text, int n_vars);

struct ExprGridProfile {
  GridSpec grid;
  std::vector<double> values;  // row-major, last axis fastest
  double min_value = 0.0;
  double max_value = 0.0;
  std::vector<double> argmin;
  std::vector<double> argmax;
};

/// Evaluates e on every grid point. Evaluation errors propagate with the
/// offending point attached.
ExprGridProfile sample_expr(const Expr& e, const GridSpec& grid);

}  // namespace halfspace
