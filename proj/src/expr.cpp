#include "scgame/expr.hpp"

#include <cctype>
#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <string>

#include "scgame/errors.hpp"

namespace scg::expr {
namespace {

constexpr int kMaxDepth = 256;

std::shared_ptr<const Node> make(NodeKind kind, std::vector<std::shared_ptr<const Node>> args = {},
                                 double c = 0.0) {
  auto n = std::make_shared<Node>();
  n->kind = kind;
  n->constant = c;
  n->args = std::move(args);
  return n;
}

class Parser {
 public:
  explicit Parser(std::string_view src) : src_(src) {}

  std::shared_ptr<const Node> parse_all() {
    skip_ws();
    if (pos_ == src_.size()) fail({"expression"}, "empty expression");
    auto n = parse_expr();
    skip_ws();
    if (pos_ != src_.size()) fail({"operator", "end of input"}, "unexpected trailing input");
    return n;
  }

 private:
  std::string_view src_;
  std::size_t pos_ = 0;
  int depth_ = 0;

  [[noreturn]] void fail(std::vector<std::string> expected, const std::string& msg) const {
    std::string what = "syntax error at offset " + std::to_string(pos_) + ": " + msg + " (expected ";
    for (std::size_t i = 0; i < expected.size(); ++i) {
      if (i) what += " | ";
      what += expected[i];
    }
    what += ")";
    throw SyntaxError(pos_, std::move(expected), what);
  }

  void skip_ws() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < src_.size() && src_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  struct DepthGuard {
    Parser& p;
    explicit DepthGuard(Parser& parser) : p(parser) {
      if (++p.depth_ > kMaxDepth) p.fail({"shallower nesting"}, "expression nested too deeply");
    }
    ~DepthGuard() { --p.depth_; }
  };

  std::shared_ptr<const Node> parse_expr() {
    DepthGuard guard(*this);
    auto lhs = parse_term();
    for (;;) {
      if (accept('+')) {
        lhs = make(NodeKind::Add, {lhs, parse_term()});
      } else if (accept('-')) {
        lhs = make(NodeKind::Sub, {lhs, parse_term()});
      } else {
        return lhs;
      }
    }
  }

  std::shared_ptr<const Node> parse_term() {
    auto lhs = parse_unary();
    for (;;) {
      if (accept('*')) {
        lhs = make(NodeKind::Mul, {lhs, parse_unary()});
      } else if (accept('/')) {
        lhs = make(NodeKind::Div, {lhs, parse_unary()});
      } else {
        return lhs;
      }
    }
  }

  std::shared_ptr<const Node> parse_unary() {
    DepthGuard guard(*this);
    if (accept('-')) return make(NodeKind::Neg, {parse_unary()});
    if (accept('+')) return parse_unary();
    return parse_power();
  }

  std::shared_ptr<const Node> parse_power() {
    auto base = parse_primary();
    if (accept('^')) return make(NodeKind::Pow, {base, parse_unary()});
    return base;
  }

  std::shared_ptr<const Node> parse_number() {
    const char* begin = src_.data() + pos_;
    // strtod needs a terminated buffer; copy the longest numeric-looking prefix.
    std::size_t end = pos_;
    while (end < src_.size() &&
           (std::isdigit(static_cast<unsigned char>(src_[end])) || src_[end] == '.' ||
            src_[end] == 'e' || src_[end] == 'E' ||
            ((src_[end] == '+' || src_[end] == '-') && end > pos_ &&
             (src_[end - 1] == 'e' || src_[end - 1] == 'E')))) {
      ++end;
    }
    std::string buf(begin, end - pos_);
    char* stop = nullptr;
    errno = 0;
    const double v = std::strtod(buf.c_str(), &stop);
    const std::size_t used = static_cast<std::size_t>(stop - buf.c_str());
    if (used == 0) fail({"number"}, "malformed number");
    if (errno == ERANGE && !std::isfinite(v)) fail({"finite number"}, "number out of range");
    pos_ += used;
    return make(NodeKind::Constant, {}, v);
  }

  std::shared_ptr<const Node> parse_primary() {
    skip_ws();
    if (pos_ >= src_.size()) fail({"number", "identifier", "'('", "'-'"}, "unexpected end of input");
    const char c = src_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
    if (c == '(') {
      ++pos_;
      auto inner = parse_expr();
      if (!accept(')')) fail({"')'"}, "unbalanced parenthesis");
      return inner;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      const std::size_t start = pos_;
      while (pos_ < src_.size() &&
             (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) {
        ++pos_;
      }
      const std::string name(src_.substr(start, pos_ - start));
      if (name == "t") return make(NodeKind::VarT);
      if (name == "x") return make(NodeKind::VarX);
      int arity = 0;
      NodeKind kind{};
      if (name == "exp") {
        kind = NodeKind::Exp, arity = 1;
      } else if (name == "log") {
        kind = NodeKind::Log, arity = 1;
      } else if (name == "sqrt") {
        kind = NodeKind::Sqrt, arity = 1;
      } else if (name == "pow") {
        kind = NodeKind::Pow, arity = 2;
      } else if (name == "min") {
        kind = NodeKind::Min, arity = 2;
      } else if (name == "max") {
        kind = NodeKind::Max, arity = 2;
      } else {
        throw UnknownIdentifier(start, name);
      }
      if (!accept('(')) fail({"'('"}, "function call needs arguments");
      std::vector<std::shared_ptr<const Node>> args;
      args.push_back(parse_expr());
      while (static_cast<int>(args.size()) < arity) {
        if (!accept(',')) fail({"','"}, name + " takes " + std::to_string(arity) + " arguments");
        args.push_back(parse_expr());
      }
      if (!accept(')')) fail({"')'"}, "too many arguments or unbalanced parenthesis");
      return make(kind, std::move(args));
    }
    fail({"number", "identifier", "'('", "'-'"}, std::string("unexpected character '") + c + "'");
  }
};

[[noreturn]] void domain_fail(const Node& n, const std::string& why) {
  throw DomainError(why + " in subexpression " + print(n));
}

bool integral_constant(const Node& n, int& out) {
  if (n.kind != NodeKind::Constant) return false;
  const double r = std::nearbyint(n.constant);
  if (r != n.constant || std::abs(r) > 1024) return false;
  out = static_cast<int>(r);
  return true;
}

Dual eval_node(const Node& n, double t, double x) {
  Dual out;
  switch (n.kind) {
    case NodeKind::Constant:
      return Dual::constant(n.constant);
    case NodeKind::VarT:
      return Dual::var_t(t);
    case NodeKind::VarX:
      return Dual::var_x(x);
    case NodeKind::Neg:
      return -eval_node(*n.args[0], t, x);
    case NodeKind::Add:
      out = eval_node(*n.args[0], t, x) + eval_node(*n.args[1], t, x);
      break;
    case NodeKind::Sub:
      out = eval_node(*n.args[0], t, x) - eval_node(*n.args[1], t, x);
      break;
    case NodeKind::Mul:
      out = eval_node(*n.args[0], t, x) * eval_node(*n.args[1], t, x);
      break;
    case NodeKind::Div: {
      const Dual num = eval_node(*n.args[0], t, x);
      const Dual den = eval_node(*n.args[1], t, x);
      if (den.value == 0.0) domain_fail(n, "division by zero");
      out = num / den;
      break;
    }
    case NodeKind::Pow: {
      const Dual base = eval_node(*n.args[0], t, x);
      int k = 0;
      if (integral_constant(*n.args[1], k)) {
        if (k < 0 && base.value == 0.0) domain_fail(n, "zero raised to a negative power");
        out = k >= 0 ? ipow(base, k) : Dual::constant(1.0) / ipow(base, -k);
      } else {
        if (base.value <= 0.0) domain_fail(n, "non-integer power of a non-positive base");
        out = exp(eval_node(*n.args[1], t, x) * log(base));
      }
      break;
    }
    case NodeKind::Exp:
      out = exp(eval_node(*n.args[0], t, x));
      break;
    case NodeKind::Log: {
      const Dual a = eval_node(*n.args[0], t, x);
      if (a.value <= 0.0) domain_fail(n, "log of a non-positive value");
      out = log(a);
      break;
    }
    case NodeKind::Sqrt: {
      const Dual a = eval_node(*n.args[0], t, x);
      if (a.value < 0.0) domain_fail(n, "sqrt of a negative value");
      if (a.value == 0.0) {
        if (a.dx != 0.0 || a.dt != 0.0) domain_fail(n, "sqrt is not differentiable at zero");
        return Dual::constant(0.0);
      }
      out = sqrt(a);
      break;
    }
    case NodeKind::Min: {
      const Dual a = eval_node(*n.args[0], t, x);
      const Dual b = eval_node(*n.args[1], t, x);
      return b.value < a.value ? b : a;
    }
    case NodeKind::Max: {
      const Dual a = eval_node(*n.args[0], t, x);
      const Dual b = eval_node(*n.args[1], t, x);
      return b.value > a.value ? b : a;
    }
  }
  if (!std::isfinite(out.value) || !std::isfinite(out.dx) || !std::isfinite(out.dt)) {
    domain_fail(n, "non-finite result");
  }
  return out;
}

std::string number_text(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

bool depends_on(const Node& n, NodeKind var) {
  if (n.kind == var) return true;
  for (const auto& a : n.args) {
    if (depends_on(*a, var)) return true;
  }
  return false;
}

}  // namespace

Expr parse(std::string_view source) { return Expr(Parser(source).parse_all()); }

Dual eval_dual(const Expr& e, double t, double x) { return eval_node(e.root(), t, x); }

Dual Expr::eval(double t, double x) const { return eval_node(*root_, t, x); }

std::string Expr::to_string() const { return print(*root_); }

bool Expr::depends_on_t() const { return depends_on(*root_, NodeKind::VarT); }
bool Expr::depends_on_x() const { return depends_on(*root_, NodeKind::VarX); }

// Fully parenthesised so that printing then parsing reproduces the tree.
std::string print(const Node& n) {
  auto bin = [&](const char* op) {
    return "(" + print(*n.args[0]) + " " + op + " " + print(*n.args[1]) + ")";
  };
  auto call = [&](const char* name) {
    std::string s = std::string(name) + "(" + print(*n.args[0]);
    for (std::size_t i = 1; i < n.args.size(); ++i) s += ", " + print(*n.args[i]);
    return s + ")";
  };
  switch (n.kind) {
    case NodeKind::Constant:
      return number_text(n.constant);
    case NodeKind::VarT:
      return "t";
    case NodeKind::VarX:
      return "x";
    case NodeKind::Neg:
      return "(-" + print(*n.args[0]) + ")";
    case NodeKind::Add:
      return bin("+");
    case NodeKind::Sub:
      return bin("-");
    case NodeKind::Mul:
      return bin("*");
    case NodeKind::Div:
      return bin("/");
    case NodeKind::Pow:
      return bin("^");
    case NodeKind::Exp:
      return call("exp");
    case NodeKind::Log:
      return call("log");
    case NodeKind::Sqrt:
      return call("sqrt");
    case NodeKind::Min:
      return call("min");
    case NodeKind::Max:
      return call("max");
  }
  return {};
}

bool structurally_equal(const Node& a, const Node& b) {
  if (a.kind != b.kind || a.args.size() != b.args.size()) return false;
  if (a.kind == NodeKind::Constant && a.constant != b.constant) return false;
  for (std::size_t i = 0; i < a.args.size(); ++i) {
    if (!structurally_equal(*a.args[i], *b.args[i])) return false;
  }
  return true;
}

}  // namespace scg::expr
