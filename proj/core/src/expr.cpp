#include "halfspace/expr.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <limits>
#include <sstream>

namespace halfspace {

struct Expr::Node {
  ExprKind kind;
  double value = 0.0;  // constant
  int index = 0;       // variable
  int exponent = 0;    // pow_int
  std::shared_ptr<const Node> lhs;
  std::shared_ptr<const Node> rhs;
};

namespace {

using NodePtr = std::shared_ptr<const Expr::Node>;

NodePtr make_node(ExprKind kind, NodePtr lhs = nullptr, NodePtr rhs = nullptr) {
  auto n = std::make_shared<Expr::Node>();
  n->kind = kind;
  n->lhs = std::move(lhs);
  n->rhs = std::move(rhs);
  return n;
}

NodePtr make_constant(double v) {
  auto n = std::make_shared<Expr::Node>();
  n->kind = ExprKind::constant;
  n->value = v;
  return n;
}

bool is_const(const NodePtr& n, double v) {
  return n->kind == ExprKind::constant && n->value == v;
}

double int_pow(double base, int k) {
  // Repeated multiplication keeps integer powers deterministic.
  const bool neg = k < 0;
  unsigned long e = neg ? static_cast<unsigned long>(-(long)k) : static_cast<unsigned long>(k);
  double acc = 1.0;
  double b = base;
  while (e != 0) {
    if (e & 1UL) acc *= b;
    b *= b;
    e >>= 1UL;
  }
  return neg ? 1.0 / acc : acc;
}

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

}  // namespace

ParseError::ParseError(const std::string& message, std::size_t offset)
    : std::runtime_error(message + " (at byte " + std::to_string(offset) + ")"),
      offset_(offset) {}

EvalError::EvalError(const std::string& message, std::string node_text, std::vector<double> point)
    : std::runtime_error(message + " in '" + node_text + "'"),
      node_text_(std::move(node_text)),
      point_(std::move(point)) {}

Expr::Expr() : node_(make_constant(0.0)) {}

Expr::Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

Expr Expr::constant(double value) { return Expr(make_constant(value)); }

Expr Expr::variable(int index) {
  if (index < 0) throw std::invalid_argument("variable index must be nonnegative");
  auto n = std::make_shared<Node>();
  n->kind = ExprKind::variable;
  n->index = index;
  return Expr(std::move(n));
}

ExprKind Expr::kind() const { return node_->kind; }
double Expr::constant_value() const { return node_->value; }
int Expr::variable_index() const { return node_->index; }
int Expr::exponent() const { return node_->exponent; }

Expr Expr::child(int which) const {
  const auto& c = which == 0 ? node_->lhs : node_->rhs;
  if (!c) throw std::out_of_range("expression node has no such child");
  return Expr(c);
}

bool Expr::is_literal_zero() const { return is_const(node_, 0.0); }
bool Expr::is_literal(double v) const { return is_const(node_, v); }

std::optional<double> Expr::literal_constant() const {
  if (node_->kind == ExprKind::constant) return node_->value;
  return std::nullopt;
}

// ---- smart constructors (conservative folding: constants plus 0/1 identities) ----

Expr operator+(const Expr& a, const Expr& b) {
  if (a.node_->kind == ExprKind::constant && b.node_->kind == ExprKind::constant)
    return Expr::constant(a.node_->value + b.node_->value);
  if (is_const(a.node_, 0.0)) return b;
  if (is_const(b.node_, 0.0)) return a;
  return Expr(make_node(ExprKind::add, a.node_, b.node_));
}

Expr operator-(const Expr& a, const Expr& b) {
  if (a.node_->kind == ExprKind::constant && b.node_->kind == ExprKind::constant)
    return Expr::constant(a.node_->value - b.node_->value);
  if (is_const(b.node_, 0.0)) return a;
  return Expr(make_node(ExprKind::sub, a.node_, b.node_));
}

Expr operator*(const Expr& a, const Expr& b) {
  if (a.node_->kind == ExprKind::constant && b.node_->kind == ExprKind::constant)
    return Expr::constant(a.node_->value * b.node_->value);
  if (is_const(a.node_, 1.0)) return b;
  if (is_const(b.node_, 1.0)) return a;
  if (is_const(a.node_, 0.0) || is_const(b.node_, 0.0)) return Expr::constant(0.0);
  return Expr(make_node(ExprKind::mul, a.node_, b.node_));
}

Expr operator/(const Expr& a, const Expr& b) {
  if (a.node_->kind == ExprKind::constant && b.node_->kind == ExprKind::constant &&
      b.node_->value != 0.0)
    return Expr::constant(a.node_->value / b.node_->value);
  if (is_const(b.node_, 1.0)) return a;
  return Expr(make_node(ExprKind::div, a.node_, b.node_));
}

Expr operator-(const Expr& a) {
  if (a.node_->kind == ExprKind::constant) return Expr::constant(-a.node_->value);
  return Expr::constant(-1.0) * a;
}

Expr pow(const Expr& base, int exponent) {
  if (exponent == 1) return base;
  if (exponent == 0) return Expr::constant(1.0);
  if (base.kind() == ExprKind::constant && !(base.constant_value() == 0.0 && exponent < 0))
    return Expr::constant(int_pow(base.constant_value(), exponent));
  auto n = std::make_shared<Expr::Node>();
  n->kind = ExprKind::pow_int;
  n->exponent = exponent;
  n->lhs = base.node_;
  return Expr(std::move(n));
}

Expr sin(const Expr& e) {
  if (e.node_->kind == ExprKind::constant) return Expr::constant(std::sin(e.node_->value));
  return Expr(make_node(ExprKind::sin_fn, e.node_));
}

Expr cos(const Expr& e) {
  if (e.node_->kind == ExprKind::constant) return Expr::constant(std::cos(e.node_->value));
  return Expr(make_node(ExprKind::cos_fn, e.node_));
}

Expr atan(const Expr& e) {
  if (e.node_->kind == ExprKind::constant) return Expr::constant(std::atan(e.node_->value));
  return Expr(make_node(ExprKind::atan_fn, e.node_));
}

Expr exp(const Expr& e) {
  if (e.node_->kind == ExprKind::constant) return Expr::constant(std::exp(e.node_->value));
  return Expr(make_node(ExprKind::exp_fn, e.node_));
}

// ---- evaluation ----

double Expr::eval(std::span<const double> point) const {
  switch (node_->kind) {
    case ExprKind::constant:
      return node_->value;
    case ExprKind::variable: {
      const std::size_t i = static_cast<std::size_t>(node_->index);
      if (i >= point.size())
        throw EvalError("point has too few coordinates", to_string(),
                        std::vector<double>(point.begin(), point.end()));
      return point[i];
    }
    case ExprKind::add:
      return Expr(node_->lhs).eval(point) + Expr(node_->rhs).eval(point);
    case ExprKind::sub:
      return Expr(node_->lhs).eval(point) - Expr(node_->rhs).eval(point);
    case ExprKind::mul:
      return Expr(node_->lhs).eval(point) * Expr(node_->rhs).eval(point);
    case ExprKind::div: {
      const double num = Expr(node_->lhs).eval(point);
      const double den = Expr(node_->rhs).eval(point);
      if (den == 0.0)
        throw EvalError("division by zero", to_string(),
                        std::vector<double>(point.begin(), point.end()));
      return num / den;
    }
    case ExprKind::pow_int: {
      const double base = Expr(node_->lhs).eval(point);
      if (base == 0.0 && node_->exponent < 0)
        throw EvalError("division by zero (negative power of zero)", to_string(),
                        std::vector<double>(point.begin(), point.end()));
      return int_pow(base, node_->exponent);
    }
    case ExprKind::sin_fn:
      return std::sin(Expr(node_->lhs).eval(point));
    case ExprKind::cos_fn:
      return std::cos(Expr(node_->lhs).eval(point));
    case ExprKind::atan_fn:
      return std::atan(Expr(node_->lhs).eval(point));
    case ExprKind::exp_fn:
      return std::exp(Expr(node_->lhs).eval(point));
  }
  throw std::logic_error("unreachable expression kind");
}

// ---- differentiation ----

Expr Expr::derivative(int axis) const {
  if (axis < 0) throw std::invalid_argument("derivative axis must be nonnegative");
  switch (node_->kind) {
    case ExprKind::constant:
      return Expr::constant(0.0);
    case ExprKind::variable:
      return Expr::constant(node_->index == axis ? 1.0 : 0.0);
    case ExprKind::add:
      return Expr(node_->lhs).derivative(axis) + Expr(node_->rhs).derivative(axis);
    case ExprKind::sub:
      return Expr(node_->lhs).derivative(axis) - Expr(node_->rhs).derivative(axis);
    case ExprKind::mul: {
      const Expr a(node_->lhs), b(node_->rhs);
      return a.derivative(axis) * b + a * b.derivative(axis);
    }
    case ExprKind::div: {
      const Expr a(node_->lhs), b(node_->rhs);
      return (a.derivative(axis) * b - a * b.derivative(axis)) / pow(b, 2);
    }
    case ExprKind::pow_int: {
      const Expr u(node_->lhs);
      const int k = node_->exponent;
      return Expr::constant(static_cast<double>(k)) * pow(u, k - 1) * u.derivative(axis);
    }
    case ExprKind::sin_fn: {
      const Expr u(node_->lhs);
      return cos(u) * u.derivative(axis);
    }
    case ExprKind::cos_fn: {
      const Expr u(node_->lhs);
      return Expr::constant(-1.0) * sin(u) * u.derivative(axis);
    }
    case ExprKind::atan_fn: {
      const Expr u(node_->lhs);
      return u.derivative(axis) / (Expr::constant(1.0) + pow(u, 2));
    }
    case ExprKind::exp_fn: {
      const Expr u(node_->lhs);
      return exp(u) * u.derivative(axis);
    }
  }
  throw std::logic_error("unreachable expression kind");
}

// ---- simplification ----

Expr Expr::simplified() const {
  switch (node_->kind) {
    case ExprKind::constant:
    case ExprKind::variable:
      return *this;
    case ExprKind::add:
      return Expr(node_->lhs).simplified() + Expr(node_->rhs).simplified();
    case ExprKind::sub:
      return Expr(node_->lhs).simplified() - Expr(node_->rhs).simplified();
    case ExprKind::mul:
      return Expr(node_->lhs).simplified() * Expr(node_->rhs).simplified();
    case ExprKind::div:
      return Expr(node_->lhs).simplified() / Expr(node_->rhs).simplified();
    case ExprKind::pow_int:
      return pow(Expr(node_->lhs).simplified(), node_->exponent);
    case ExprKind::sin_fn:
      return sin(Expr(node_->lhs).simplified());
    case ExprKind::cos_fn:
      return cos(Expr(node_->lhs).simplified());
    case ExprKind::atan_fn:
      return atan(Expr(node_->lhs).simplified());
    case ExprKind::exp_fn:
      return exp(Expr(node_->lhs).simplified());
  }
  throw std::logic_error("unreachable expression kind");
}

int Expr::max_variable_index() const {
  switch (node_->kind) {
    case ExprKind::constant:
      return -1;
    case ExprKind::variable:
      return node_->index;
    default: {
      int m = node_->lhs ? Expr(node_->lhs).max_variable_index() : -1;
      if (node_->rhs) m = std::max(m, Expr(node_->rhs).max_variable_index());
      return m;
    }
  }
}

bool Expr::structurally_equal(const Expr& other) const {
  const Node& a = *node_;
  const Node& b = *other.node_;
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case ExprKind::constant:
      return a.value == b.value;
    case ExprKind::variable:
      return a.index == b.index;
    case ExprKind::pow_int:
      return a.exponent == b.exponent && Expr(a.lhs).structurally_equal(Expr(b.lhs));
    case ExprKind::sin_fn:
    case ExprKind::cos_fn:
    case ExprKind::atan_fn:
    case ExprKind::exp_fn:
      return Expr(a.lhs).structurally_equal(Expr(b.lhs));
    default:
      return Expr(a.lhs).structurally_equal(Expr(b.lhs)) &&
             Expr(a.rhs).structurally_equal(Expr(b.rhs));
  }
}

// ---- printing ----
// Precedence levels: atoms 5, integer power 4, unary minus 3, * / 2, + - 1.

namespace {

int print_precedence(const Expr::Node& n) {
  switch (n.kind) {
    case ExprKind::constant:
      return n.value < 0.0 ? 3 : 5;
    case ExprKind::variable:
    case ExprKind::sin_fn:
    case ExprKind::cos_fn:
    case ExprKind::atan_fn:
    case ExprKind::exp_fn:
      return 5;
    case ExprKind::pow_int:
      return 4;
    case ExprKind::mul:
      if (n.lhs->kind == ExprKind::constant && n.lhs->value == -1.0) return 3;  // printed as unary minus
      return 2;
    case ExprKind::div:
      return 2;
    case ExprKind::add:
    case ExprKind::sub:
      return 1;
  }
  return 5;
}

void print_node(const Expr::Node& n, int min_prec, std::string& out);

void print_child(const NodePtr& c, int min_prec, std::string& out) {
  if (print_precedence(*c) < min_prec) {
    out += '(';
    print_node(*c, 0, out);
    out += ')';
  } else {
    print_node(*c, 0, out);
  }
}

void print_node(const Expr::Node& n, int, std::string& out) {
  switch (n.kind) {
    case ExprKind::constant:
      out += format_double(n.value);
      return;
    case ExprKind::variable:
      out += 'x';
      out += std::to_string(n.index + 1);
      return;
    case ExprKind::add:
      print_child(n.lhs, 1, out);
      out += " + ";
      print_child(n.rhs, 2, out);
      return;
    case ExprKind::sub:
      print_child(n.lhs, 1, out);
      out += " - ";
      print_child(n.rhs, 2, out);
      return;
    case ExprKind::mul:
      if (n.lhs->kind == ExprKind::constant && n.lhs->value == -1.0) {
        out += '-';
        print_child(n.rhs, 3, out);
        return;
      }
      print_child(n.lhs, 2, out);
      out += '*';
      print_child(n.rhs, 3, out);
      return;
    case ExprKind::div:
      print_child(n.lhs, 2, out);
      out += '/';
      print_child(n.rhs, 3, out);
      return;
    case ExprKind::pow_int:
      print_child(n.lhs, 5, out);
      out += '^';
      out += std::to_string(n.exponent);
      return;
    case ExprKind::sin_fn:
    case ExprKind::cos_fn:
    case ExprKind::atan_fn:
    case ExprKind::exp_fn: {
      const char* name = n.kind == ExprKind::sin_fn    ? "sin"
                         : n.kind == ExprKind::cos_fn  ? "cos"
                         : n.kind == ExprKind::atan_fn ? "atan"
                                                       : "exp";
      out += name;
      out += '(';
      print_node(*n.lhs, 0, out);
      out += ')';
      return;
    }
  }
}

}  // namespace

std::string Expr::to_string() const {
  std::string out;
  print_node(*node_, 0, out);
  return out;
}

// ---- parser ----

namespace {

class Parser {
 public:
  Parser(std::string_view text, int n_vars) : text_(text), n_vars_(n_vars) {}

  Expr run() {
    skip_ws();
    if (eof()) throw ParseError("empty expression", 0);
    Expr e = parse_expression(0);
    skip_ws();
    if (!eof()) throw ParseError("unexpected trailing input", pos_);
    return e;
  }

 private:
  static constexpr int kMaxDepth = 256;

  std::string_view text_;
  std::size_t pos_ = 0;
  int n_vars_;

  bool eof() const { return pos_ >= text_.size(); }
  char peek() const { return text_[pos_]; }

  void skip_ws() {
    while (!eof() && (peek() == ' ' || peek() == '\t' || peek() == '\n' || peek() == '\r')) ++pos_;
  }

  void check_depth(int depth) const {
    if (depth > kMaxDepth) throw ParseError("expression too deeply nested", pos_);
  }

  Expr parse_expression(int depth) {
    check_depth(depth);
    Expr lhs = parse_term(depth + 1);
    for (;;) {
      skip_ws();
      if (eof()) return lhs;
      const char c = peek();
      if (c == '+') {
        ++pos_;
        lhs = lhs + parse_term(depth + 1);
      } else if (c == '-') {
        ++pos_;
        lhs = lhs - parse_term(depth + 1);
      } else {
        return lhs;
      }
    }
  }

  Expr parse_term(int depth) {
    check_depth(depth);
    Expr lhs = parse_factor(depth + 1);
    for (;;) {
      skip_ws();
      if (eof()) return lhs;
      const char c = peek();
      if (c == '*') {
        ++pos_;
        lhs = lhs * parse_factor(depth + 1);
      } else if (c == '/') {
        ++pos_;
        lhs = lhs / parse_factor(depth + 1);
      } else {
        return lhs;
      }
    }
  }

  Expr parse_factor(int depth) {
    check_depth(depth);
    skip_ws();
    if (eof()) throw ParseError("unexpected end of input", pos_);
    if (peek() == '-') {
      ++pos_;
      return -parse_factor(depth + 1);
    }
    return parse_power(depth + 1);
  }

  Expr parse_power(int depth) {
    check_depth(depth);
    Expr base = parse_atom(depth + 1);
    for (;;) {
      skip_ws();
      if (eof() || peek() != '^') return base;
      ++pos_;
      base = pow(base, parse_int_exponent());
    }
  }

  int parse_int_exponent() {
    skip_ws();
    const std::size_t start = pos_;
    bool neg = false;
    if (!eof() && peek() == '-') {
      neg = true;
      ++pos_;
    }
    if (eof() || !std::isdigit(static_cast<unsigned char>(peek())))
      throw ParseError("integer exponent expected after '^'", pos_);
    long v = 0;
    while (!eof() && std::isdigit(static_cast<unsigned char>(peek()))) {
      v = v * 10 + (peek() - '0');
      if (v > 1000000) throw ParseError("integer exponent too large", start);
      ++pos_;
    }
    return static_cast<int>(neg ? -v : v);
  }

  Expr parse_atom(int depth) {
    check_depth(depth);
    skip_ws();
    if (eof()) throw ParseError("unexpected end of input", pos_);
    const char c = peek();
    if (c == '(') {
      ++pos_;
      Expr e = parse_expression(depth + 1);
      skip_ws();
      if (eof() || peek() != ')') throw ParseError("expected ')'", pos_);
      ++pos_;
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_identifier(depth);
    throw ParseError(std::string("unexpected character '") + c + "'", pos_);
  }

  Expr parse_number() {
    const std::size_t start = pos_;
    while (!eof() && std::isdigit(static_cast<unsigned char>(peek()))) ++pos_;
    if (!eof() && peek() == '.') {
      ++pos_;
      if (eof() || !std::isdigit(static_cast<unsigned char>(peek())))
        throw ParseError("digits expected after decimal point", pos_);
      while (!eof() && std::isdigit(static_cast<unsigned char>(peek()))) ++pos_;
    }
    if (!eof() && (peek() == 'e' || peek() == 'E')) {
      const std::size_t mark = pos_;
      ++pos_;
      if (!eof() && (peek() == '+' || peek() == '-')) ++pos_;
      if (eof() || !std::isdigit(static_cast<unsigned char>(peek()))) {
        pos_ = mark;  // not an exponent suffix; leave for caller (e.g. '2e' invalid anyway)
        throw ParseError("digits expected in exponent", pos_ + 1);
      }
      while (!eof() && std::isdigit(static_cast<unsigned char>(peek()))) ++pos_;
    }
    double value = 0.0;
    const char* first = text_.data() + start;
    const char* last = text_.data() + pos_;
    auto res = std::from_chars(first, last, value);
    if (res.ec != std::errc() || res.ptr != last)
      throw ParseError("invalid number literal", start);
    return Expr::constant(value);
  }

  Expr parse_identifier(int depth) {
    const std::size_t start = pos_;
    while (!eof() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_')) ++pos_;
    const std::string_view name = text_.substr(start, pos_ - start);
    if (name == "sin" || name == "cos" || name == "atan" || name == "exp") {
      skip_ws();
      if (eof() || peek() != '(')
        throw ParseError("expected '(' after function name '" + std::string(name) + "'", pos_);
      ++pos_;
      Expr arg = parse_expression(depth + 1);
      skip_ws();
      if (eof() || peek() != ')') throw ParseError("expected ')'", pos_);
      ++pos_;
      if (name == "sin") return sin(arg);
      if (name == "cos") return cos(arg);
      if (name == "atan") return atan(arg);
      return exp(arg);
    }
    if (name.size() >= 2 && name[0] == 'x' &&
        std::all_of(name.begin() + 1, name.end(),
                    [](char ch) { return std::isdigit(static_cast<unsigned char>(ch)); })) {
      long idx = 0;
      for (std::size_t i = 1; i < name.size(); ++i) idx = idx * 10 + (name[i] - '0');
      if (idx < 1 || idx > n_vars_)
        throw ParseError("variable index out of range: " + std::string(name) + " with " +
                             std::to_string(n_vars_) + " variable(s)",
                         start);
      return Expr::variable(static_cast<int>(idx - 1));
    }
    throw ParseError("unknown identifier '" + std::string(name) + "'", start);
  }
};

}  // namespace

Expr parse_expr(std::string_view text, int n_vars) {
  if (n_vars < 0) throw std::invalid_argument("n_vars must be nonnegative");
  return Parser(text, n_vars).run();
}

// ---- grid sampling ----

ExprGridProfile sample_expr(const Expr& e, const GridSpec& grid) {
  ExprGridProfile profile;
  profile.grid = grid;
  const std::size_t n = grid.point_count();
  profile.values.assign(n, 0.0);

  struct Extreme {
    double min = std::numeric_limits<double>::infinity();
    double max = -std::numeric_limits<double>::infinity();
    std::size_t imin = 0, imax = 0;
  };
  const std::size_t chunks = parallel_chunk_count(n);
  std::vector<Extreme> partial(chunks == 0 ? 1 : chunks);

  parallel_for_chunked(n, [&](std::size_t chunk, std::size_t begin, std::size_t end) {
    Extreme ex;
    std::vector<double> pt;
    std::vector<int> idx;
    pt.resize(static_cast<std::size_t>(grid.dim()));
    for (std::size_t i = begin; i < end; ++i) {
      grid.decompose(i, idx);
      for (int a = 0; a < grid.dim(); ++a)
        pt[static_cast<std::size_t>(a)] = grid.coord(a, idx[static_cast<std::size_t>(a)]);
      const double v = e.eval(pt);
      profile.values[i] = v;
      if (v < ex.min || (v == ex.min && i < ex.imin)) {
        ex.min = v;
        ex.imin = i;
      }
      if (v > ex.max || (v == ex.max && i < ex.imax)) {
        ex.max = v;
        ex.imax = i;
      }
    }
    partial[chunk] = ex;
  });

  Extreme total;
  bool first = true;
  for (const auto& ex : partial) {
    if (first) {
      total = ex;
      first = false;
      continue;
    }
    if (ex.min < total.min || (ex.min == total.min && ex.imin < total.imin)) {
      total.min = ex.min;
      total.imin = ex.imin;
    }
    if (ex.max > total.max || (ex.max == total.max && ex.imax < total.imax)) {
      total.max = ex.max;
      total.imax = ex.imax;
    }
  }
  profile.min_value = total.min;
  profile.max_value = total.max;
  profile.argmin = grid.point(total.imin);
  profile.argmax = grid.point(total.imax);
  return profile;
}

}  // namespace halfspace
