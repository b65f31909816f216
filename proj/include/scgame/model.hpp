#pragma once

#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "scgame/expr.hpp"

namespace scg {

using expr::Dual;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class Domain { RealLine, HalfLine };

std::string to_string(Domain d);
Domain domain_from_string(const std::string& s);

/// Coefficient function of (t, x) returning value and first partials.
///
/// Either a closed-form family (derivatives coded by hand) or a parsed
/// expression (derivatives from dual-number evaluation). `description` is the
/// human-readable form echoed into output headers.
class ScalarFn {
 public:
  using Kernel = std::function<Dual(double t, double x)>;

  ScalarFn() = default;
  ScalarFn(Kernel k, std::string description)
      : kernel_(std::move(k)), description_(std::move(description)) {}

  static ScalarFn constant(double c);
  static ScalarFn from_expr(const expr::Expr& e);
  static ScalarFn parse(const std::string& source);

  Dual eval(double t, double x) const { return kernel_(t, x); }
  double operator()(double t, double x) const { return kernel_(t, x).value; }
  double dx(double t, double x) const { return kernel_(t, x).dx; }
  double dt(double t, double x) const { return kernel_(t, x).dt; }

  const std::string& description() const { return description_; }
  explicit operator bool() const { return static_cast<bool>(kernel_); }

 private:
  Kernel kernel_;
  std::string description_;
};

/// Problem instance: dynamics dX = mu(X)ds + sigma(X)dW + dnu, running gain h,
/// stopping payoff g, discount r, marginal control cost alpha0, horizon T.
///
/// mu is a function of x only (the t argument is ignored), g of t only.
struct GameSpec {
  Domain domain = Domain::HalfLine;
  ScalarFn mu;
  double sigma0 = 0.0;
  double sigma1 = 0.0;
  ScalarFn g;
  ScalarFn h;
  double r = 0.0;
  double alpha0 = 1.0;
  double T = 1.0;
  std::string family = "custom";

  /// Throws ConfigError when an invariant fails.
  void validate() const;

  double sigma(double x) const { return domain == Domain::RealLine ? sigma0 : sigma1 * x; }
  double sigma_x(double /*x*/) const { return domain == Domain::RealLine ? 0.0 : sigma1; }
  double inf_domain() const { return domain == Domain::RealLine ? -kInf : 0.0; }

  /// Throws DomainError for x outside the closure of the state space.
  void check_state(double x) const;
};

double theta(const GameSpec& spec, double t, double x);

/// Discount rate of the auxiliary problem, r - mu_x(y).
double lambda_fn(const GameSpec& spec, double y);

struct Bracket {
  double lo;
  double hi;
};

/// Smallest y in the bracket with theta(t, y) > 0, to absolute tolerance
/// tol_x. Returns +inf when theta <= 0 on the whole bracket and the lower end
/// when theta > 0 on all of it. Throws AssumptionViolation if sampled values
/// are not monotone.
double theta_lower(const GameSpec& spec, double t, Bracket bracket, double tol_x = 1e-10);

struct ProbeLattice {
  int n_t = 64;
  int n_x = 256;
  double x_lo = 0.0;
  double x_hi = 6.0;
};

struct Witness {
  double t;
  double x;
  double observed;
};

struct ClauseVerdict {
  std::string id;
  std::string description;
  bool passed = true;
  std::vector<Witness> witnesses;
};

struct AssumptionReport {
  std::vector<ClauseVerdict> clauses;
  double k1 = 0.0;  ///< empirical -inf theta over the probes

  bool all_passed() const;
  const ClauseVerdict* find(const std::string& id) const;
};

AssumptionReport validate_assumptions(const GameSpec& spec, const ProbeLattice& probes);

struct BenchmarkParams {
  double r = 0.1;
  double alpha0 = 1.0;
  double T = 1.0;
};

/// Half-line instance: g = 0, h = kappa1 x^2 - kappa2, mu = mu_lin x,
/// sigma = sigma_lin x.
GameSpec benchmark_spec(double kappa1, double kappa2, double mu_lin, double sigma_lin,
                        const BenchmarkParams& extra = {});

/// Real-line instance: mu = beta x + c, sigma = sigma0,
/// h = kappa1 ((x)^+)^2 - kappa2, g = g0 + g1 t.
GameSpec real_line_spec(double beta, double c, double sigma0, double kappa1, double kappa2,
                        double g0, double g1, const BenchmarkParams& extra = {});

/// Half-line instance with the piecewise-power drift
/// mu = ((x-c)^+)^p on [0,n], (n-c)^(p-1) (n-c + p(x-n)) beyond n,
/// and the benchmark h, g.
GameSpec power_drift_spec(double p, double n, double c, double kappa1, double kappa2,
                          double sigma_lin, const BenchmarkParams& extra = {});

}  // namespace scg
