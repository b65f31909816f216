#include "scgame/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "scgame/errors.hpp"

namespace scg {
namespace {

std::string fmt_num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Slack for monotonicity comparisons on sampled values.
double slack(double v) { return 1e-9 * (1.0 + std::abs(v)); }

}  // namespace

std::string to_string(Domain d) { return d == Domain::RealLine ? "real_line" : "half_line"; }

Domain domain_from_string(const std::string& s) {
  if (s == "real_line") return Domain::RealLine;
  if (s == "half_line") return Domain::HalfLine;
  throw ConfigError("unknown domain '" + s + "' (expected real_line or half_line)");
}

ScalarFn ScalarFn::constant(double c) {
  return ScalarFn([c](double, double) { return Dual::constant(c); }, fmt_num(c));
}

ScalarFn ScalarFn::from_expr(const expr::Expr& e) {
  return ScalarFn([e](double t, double x) { return e.eval(t, x); }, e.to_string());
}

ScalarFn ScalarFn::parse(const std::string& source) { return from_expr(expr::parse(source)); }

void GameSpec::validate() const {
  if (!mu || !g || !h) throw ConfigError("coefficients mu, g and h must all be set");
  if (!(alpha0 > 0.0) || !std::isfinite(alpha0)) throw ConfigError("alpha0 must be positive");
  if (!(T > 0.0) || !std::isfinite(T)) throw ConfigError("T must be positive");
  if (!(r >= 0.0) || !std::isfinite(r)) throw ConfigError("r must be non-negative");
  if (domain == Domain::RealLine) {
    if (!(sigma0 > 0.0) || sigma1 != 0.0) {
      throw ConfigError("real_line requires sigma0 > 0 and sigma1 = 0");
    }
  } else {
    if (!(sigma1 > 0.0) || sigma0 != 0.0) {
      throw ConfigError("half_line requires sigma1 > 0 and sigma0 = 0");
    }
    const double mu0 = mu(0.0, 0.0);
    if (std::abs(mu0) > 1e-12) throw ConfigError("half_line requires mu(0) = 0, got " + fmt_num(mu0));
  }
}

void GameSpec::check_state(double x) const {
  if (std::isnan(x)) throw DomainError("state is NaN");
  if (domain == Domain::HalfLine && x < 0.0) {
    throw DomainError("state " + fmt_num(x) + " lies outside [0, inf)");
  }
}

double theta(const GameSpec& spec, double t, double x) {
  if (!(t >= 0.0 && t <= spec.T)) throw DomainError("time " + fmt_num(t) + " outside [0, T]");
  spec.check_state(x);
  const Dual gv = spec.g.eval(t, 0.0);
  return gv.dt - spec.r * gv.value + spec.h(t, x);
}

double lambda_fn(const GameSpec& spec, double y) { return spec.r - spec.mu.dx(0.0, y); }

double theta_lower(const GameSpec& spec, double t, Bracket bracket, double tol_x) {
  if (!(bracket.hi > bracket.lo)) throw ConfigError("theta_lower: empty bracket");
  constexpr int kSamples = 257;
  std::vector<double> xs(kSamples), th(kSamples);
  for (int i = 0; i < kSamples; ++i) {
    xs[i] = bracket.lo + (bracket.hi - bracket.lo) * i / (kSamples - 1);
    th[i] = theta(spec, t, xs[i]);
    if (i > 0 && th[i] < th[i - 1] - slack(th[i - 1])) {
      throw AssumptionViolation("theta(" + fmt_num(t) + ", .) decreases between x=" +
                                fmt_num(xs[i - 1]) + " and x=" + fmt_num(xs[i]));
    }
  }
  if (th.front() > 0.0) return bracket.lo;
  if (th.back() <= 0.0) return kInf;
  int j = 1;
  while (th[j] <= 0.0) ++j;
  double lo = xs[j - 1], hi = xs[j];
  while (hi - lo > tol_x) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (theta(spec, t, mid) > 0.0) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

bool AssumptionReport::all_passed() const {
  return std::all_of(clauses.begin(), clauses.end(), [](const auto& c) { return c.passed; });
}

const ClauseVerdict* AssumptionReport::find(const std::string& id) const {
  for (const auto& c : clauses) {
    if (c.id == id) return &c;
  }
  return nullptr;
}

AssumptionReport validate_assumptions(const GameSpec& spec, const ProbeLattice& probes) {
  AssumptionReport report;
  const int nt = std::max(2, probes.n_t);
  const int nx = std::max(3, probes.n_x);
  const double x_lo = spec.domain == Domain::HalfLine ? std::max(0.0, probes.x_lo) : probes.x_lo;
  const double x_hi = probes.x_hi;
  std::vector<double> ts(nt), xs(nx);
  for (int j = 0; j < nt; ++j) ts[j] = spec.T * j / (nt - 1);
  for (int i = 0; i < nx; ++i) xs[i] = x_lo + (x_hi - x_lo) * i / (nx - 1);

  // References returned by clause() must stay valid while later clauses are added.
  report.clauses.reserve(16);
  auto clause = [&](std::string id, std::string description) -> ClauseVerdict& {
    report.clauses.push_back({std::move(id), std::move(description), true, {}});
    return report.clauses.back();
  };
  auto fail = [](ClauseVerdict& c, double t, double x, double observed) {
    c.passed = false;
    if (c.witnesses.size() < 8) c.witnesses.push_back({t, x, observed});
  };

  // Sample everything up front; evaluation failures become a verdict.
  std::vector<double> mu(nx), mux(nx), th(nt * nx), hx(nt * nx);
  auto& evaluable = clause("coefficients_evaluable", "mu, g, h evaluate on every probe point");
  try {
    for (int i = 0; i < nx; ++i) {
      const Dual m = spec.mu.eval(0.0, xs[i]);
      mu[i] = m.value;
      mux[i] = m.dx;
    }
    for (int j = 0; j < nt; ++j) {
      for (int i = 0; i < nx; ++i) {
        th[j * nx + i] = theta(spec, ts[j], xs[i]);
        hx[j * nx + i] = spec.h.dx(ts[j], xs[i]);
      }
    }
  } catch (const Error&) {
    fail(evaluable, 0.0, 0.0, std::nan(""));
    return report;
  }

  auto& convex = clause("mu_convex", "x -> mu(x) is convex (discrete second difference >= -tol)");
  for (int i = 1; i + 1 < nx; ++i) {
    const double d2 = mu[i - 1] - 2.0 * mu[i] + mu[i + 1];
    if (d2 < -slack(mu[i])) fail(convex, 0.0, xs[i], d2);
  }

  auto& bounded = clause("mu_x_bounded_above", "mu_x stops growing beyond the probe window");
  {
    const double sup_window = *std::max_element(mux.begin(), mux.end());
    const double far = x_hi + 3.0 * (x_hi - x_lo);
    const double mux_far = spec.mu.dx(0.0, far);
    if (mux_far > sup_window + 1e-6 * (1.0 + std::abs(sup_window))) fail(bounded, 0.0, far, mux_far);
  }

  auto& hx_nonneg = clause("h_x_nonnegative", "h_x >= 0");
  auto& hx_incr = clause("h_x_nondecreasing_in_x", "x -> h_x(t, x) is non-decreasing");
  auto& hx_decr_t = clause("h_x_nonincreasing_in_t", "t -> h_x(t, x) is non-increasing");
  auto& th_decr_t = clause("theta_nonincreasing_in_t", "t -> theta(t, x) is non-increasing");
  for (int j = 0; j < nt; ++j) {
    for (int i = 0; i < nx; ++i) {
      const double v = hx[j * nx + i];
      if (v < -slack(0.0)) fail(hx_nonneg, ts[j], xs[i], v);
      if (i > 0 && v < hx[j * nx + i - 1] - slack(v)) fail(hx_incr, ts[j], xs[i], v - hx[j * nx + i - 1]);
      if (j > 0) {
        const double dh = v - hx[(j - 1) * nx + i];
        if (dh > slack(v)) fail(hx_decr_t, ts[j], xs[i], dh);
        const double dth = th[j * nx + i] - th[(j - 1) * nx + i];
        if (dth > slack(th[j * nx + i])) fail(th_decr_t, ts[j], xs[i], dth);
      }
    }
  }

  auto& below = clause("theta_bounded_below", "inf theta = -K1 is finite");
  {
    const double window_min = *std::min_element(th.begin(), th.end());
    double ext_min = window_min;
    double ext_x = x_lo;
    if (spec.domain == Domain::RealLine) {
      for (int k = 1; k <= 4; ++k) {
        const double xf = x_lo - k * (x_hi - x_lo);
        for (int j = 0; j < nt; ++j) {
          const double v = theta(spec, ts[j], xf);
          if (v < ext_min) {
            ext_min = v;
            ext_x = xf;
          }
        }
      }
    }
    report.k1 = -window_min;
    if (!std::isfinite(window_min) || ext_min < window_min - slack(window_min)) {
      fail(below, 0.0, ext_x, ext_min);
    }
  }

  auto& positive = clause("theta_positive_somewhere", "sup_x theta(t, x) > 0 for t < T");
  for (int j = 0; j + 1 < nt; ++j) {
    const double* row = &th[j * nx];
    const double m = *std::max_element(row, row + nx);
    if (!(m > 0.0)) fail(positive, ts[j], x_hi, m);
  }

  if (spec.domain == Domain::HalfLine) {
    auto& mu0 = clause("mu_zero_at_origin", "mu(0) = 0 on the half line");
    if (std::abs(spec.mu(0.0, 0.0)) > 1e-12) fail(mu0, 0.0, 0.0, spec.mu(0.0, 0.0));
    auto& th0 = clause("theta_origin_negative", "theta(0, 0) < 0 on the half line");
    const double v = theta(spec, 0.0, 0.0);
    if (!(v < 0.0)) fail(th0, 0.0, 0.0, v);
  }
  return report;
}

GameSpec benchmark_spec(double kappa1, double kappa2, double mu_lin, double sigma_lin,
                        const BenchmarkParams& extra) {
  if (!(kappa1 > 0.0) || !(kappa2 > 0.0)) throw ConfigError("benchmark: kappa1, kappa2 must be > 0");
  if (!(sigma_lin > 0.0)) throw ConfigError("benchmark: sigma must be > 0");
  GameSpec s;
  s.domain = Domain::HalfLine;
  s.family = "benchmark";
  s.mu = ScalarFn([mu_lin](double, double x) { return Dual{mu_lin * x, mu_lin, 0.0}; },
                  fmt_num(mu_lin) + " * x");
  s.sigma1 = sigma_lin;
  s.g = ScalarFn::constant(0.0);
  s.h = ScalarFn(
      [kappa1, kappa2](double, double x) { return Dual{kappa1 * x * x - kappa2, 2.0 * kappa1 * x, 0.0}; },
      fmt_num(kappa1) + " * x^2 - " + fmt_num(kappa2));
  s.r = extra.r;
  s.alpha0 = extra.alpha0;
  s.T = extra.T;
  s.validate();
  return s;
}

GameSpec real_line_spec(double beta, double c, double sigma0, double kappa1, double kappa2,
                        double g0, double g1, const BenchmarkParams& extra) {
  if (!(sigma0 > 0.0)) throw ConfigError("real_line_linear: sigma0 must be > 0");
  if (kappa1 < 0.0) throw ConfigError("real_line_linear: kappa1 must be >= 0");
  GameSpec s;
  s.domain = Domain::RealLine;
  s.family = "real_line_linear";
  s.mu = ScalarFn([beta, c](double, double x) { return Dual{beta * x + c, beta, 0.0}; },
                  fmt_num(beta) + " * x + " + fmt_num(c));
  s.sigma0 = sigma0;
  s.g = ScalarFn([g0, g1](double t, double) { return Dual{g0 + g1 * t, 0.0, g1}; },
                 fmt_num(g0) + " + " + fmt_num(g1) + " * t");
  s.h = ScalarFn(
      [kappa1, kappa2](double, double x) {
        const double xp = std::max(x, 0.0);
        return Dual{kappa1 * xp * xp - kappa2, 2.0 * kappa1 * xp, 0.0};
      },
      fmt_num(kappa1) + " * max(x, 0)^2 - " + fmt_num(kappa2));
  s.r = extra.r;
  s.alpha0 = extra.alpha0;
  s.T = extra.T;
  s.validate();
  return s;
}

GameSpec power_drift_spec(double p, double n, double c, double kappa1, double kappa2,
                          double sigma_lin, const BenchmarkParams& extra) {
  if (!(p > 1.0)) throw ConfigError("power_drift: p must be > 1");
  if (!(n > c && c >= 0.0)) throw ConfigError("power_drift: need n > c >= 0");
  GameSpec s = benchmark_spec(kappa1, kappa2, 0.0, sigma_lin, extra);
  s.family = "power_drift";
  s.mu = ScalarFn(
      [p, n, c](double, double x) {
        if (x <= n) {
          const double y = std::max(x - c, 0.0);
          return Dual{std::pow(y, p), p * std::pow(y, p - 1.0), 0.0};
        }
        const double k = std::pow(n - c, p - 1.0);
        return Dual{k * (n - c + p * (x - n)), p * k, 0.0};
      },
      "power_drift(p=" + fmt_num(p) + ", n=" + fmt_num(n) + ", c=" + fmt_num(c) + ")");
  s.validate();
  return s;
}

}  // namespace scg
