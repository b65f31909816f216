#pragma once

// Coefficient expression language.
//
// Grammar (whitespace-insensitive, standard precedence, '^' right associative
// and binding tighter than unary minus):
//
//   expr    := term (('+' | '-') term)*
//   term    := unary (('*' | '/') unary)*
//   unary   := ('-' | '+') unary | power
//   power   := primary ('^' unary)?
//   primary := number | 't' | 'x' | func '(' expr (',' expr)* ')' | '(' expr ')'
//   func    := exp | log | sqrt | pow | min | max
//
// Evaluation is forward-mode on a two-seed dual number, giving exact first
// partials in x and t.

#include <cmath>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace scg::expr {

/// Value with first partials in x and t.
struct Dual {
  double value = 0.0;
  double dx = 0.0;
  double dt = 0.0;

  static constexpr Dual constant(double v) { return {v, 0.0, 0.0}; }
  static constexpr Dual var_x(double v) { return {v, 1.0, 0.0}; }
  static constexpr Dual var_t(double v) { return {v, 0.0, 1.0}; }
};

constexpr Dual operator+(Dual a, Dual b) { return {a.value + b.value, a.dx + b.dx, a.dt + b.dt}; }
constexpr Dual operator-(Dual a, Dual b) { return {a.value - b.value, a.dx - b.dx, a.dt - b.dt}; }
constexpr Dual operator-(Dual a) { return {-a.value, -a.dx, -a.dt}; }
constexpr Dual operator*(Dual a, Dual b) {
  return {a.value * b.value, a.dx * b.value + a.value * b.dx, a.dt * b.value + a.value * b.dt};
}
constexpr Dual operator*(double s, Dual a) { return {s * a.value, s * a.dx, s * a.dt}; }
constexpr Dual operator+(Dual a, double s) { return {a.value + s, a.dx, a.dt}; }
constexpr Dual operator-(Dual a, double s) { return {a.value - s, a.dx, a.dt}; }
inline Dual operator/(Dual a, Dual b) {
  const double q = a.value / b.value;
  return {q, (a.dx - q * b.dx) / b.value, (a.dt - q * b.dt) / b.value};
}

// Chain rule: f(a) with f'(a.value) = slope.
constexpr Dual chain(Dual a, double f, double slope) { return {f, slope * a.dx, slope * a.dt}; }

inline Dual exp(Dual a) {
  const double e = std::exp(a.value);
  return chain(a, e, e);
}
inline Dual log(Dual a) { return chain(a, std::log(a.value), 1.0 / a.value); }
inline Dual sqrt(Dual a) {
  const double s = std::sqrt(a.value);
  return chain(a, s, 0.5 / s);
}
inline Dual ipow(Dual a, int n) {
  if (n == 0) return Dual::constant(1.0);
  const double p = std::pow(a.value, n - 1);
  return chain(a, p * a.value, n * p);
}

enum class NodeKind { Constant, VarT, VarX, Neg, Add, Sub, Mul, Div, Pow, Exp, Log, Sqrt, Min, Max };

struct Node {
  NodeKind kind = NodeKind::Constant;
  double constant = 0.0;
  std::vector<std::shared_ptr<const Node>> args;
};

/// Immutable parsed expression; cheap to copy.
class Expr {
 public:
  Expr() = default;
  explicit Expr(std::shared_ptr<const Node> root) : root_(std::move(root)) {}

  const Node& root() const { return *root_; }
  bool empty() const { return root_ == nullptr; }

  Dual eval(double t, double x) const;
  std::string to_string() const;

  bool depends_on_t() const;
  bool depends_on_x() const;

 private:
  std::shared_ptr<const Node> root_;
};

/// Throws SyntaxError (with byte offset and expected tokens) or UnknownIdentifier.
Expr parse(std::string_view source);

/// Throws DomainError naming the offending subexpression.
Dual eval_dual(const Expr& e, double t, double x);

std::string print(const Node& n);
bool structurally_equal(const Node& a, const Node& b);

}  // namespace scg::expr
