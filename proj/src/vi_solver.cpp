#include "scgame/vi_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "scgame/errors.hpp"
#include "scgame/tridiag.hpp"

namespace scg {

std::string to_string(SchemeKind s) { return s == SchemeKind::Penalized ? "penalized" : "projected"; }

namespace {

// Spatial operator L - r on every row except the Dirichlet row 0. The last row
// drops the diffusion term (zero curvature at the truncation edge) and uses a
// backward difference for the drift.
Stencil operator_rows(const GameSpec& spec, const Grid& grid) {
  Stencil s = build_stencil(
      grid, [&](double x) { return 0.5 * spec.sigma(x) * spec.sigma(x); },
      [&](double x) { return spec.mu(0.0, x); }, [&](double) { return spec.r; });
  const std::size_t last = grid.n_x() - 1;
  const double m = spec.mu(0.0, grid.x_nodes[last]);
  s.lower[last] = -m / grid.dx;
  s.diag[last] = m / grid.dx - spec.r;
  s.upper[last] = 0.0;
  return s;
}

double apply_row(const Stencil& s, std::span<const double> f, std::size_t i) {
  double out = s.lower[i] * f[i - 1] + s.diag[i] * f[i];
  if (i + 1 < f.size()) out += s.upper[i] * f[i + 1];
  return out;
}

ValueSurface make_surface(const GameSpec& spec, const Grid& grid, SchemeKind scheme) {
  ValueSurface out;
  out.grid = grid;
  out.scheme = scheme;
  out.alpha0 = spec.alpha0;
  out.v.assign(grid.n_t() * grid.n_x(), 0.0);
  out.obstacle.resize(grid.n_t());
  for (std::size_t n = 0; n < grid.n_t(); ++n) out.obstacle[n] = spec.g(grid.t_nodes[n], 0.0);
  const std::size_t last = grid.n_t() - 1;
  const double gT = spec.g(grid.T(), 0.0);
  for (std::size_t i = 0; i < grid.n_x(); ++i) out.v[grid.index(last, i)] = gT;
  return out;
}

double sum_sq(std::span<const double> a) {
  double s = 0.0;
  for (double x : a) s += x * x;
  return s;
}

double sup_abs(std::span<const double> a) {
  double m = 0.0;
  for (double x : a) m = std::max(m, std::abs(x));
  return m;
}

// Implicit Euler matrix I - dt (L - r) with the Dirichlet row 0.
struct LinearStep {
  std::vector<double> lo, di, up;

  LinearStep(const Stencil& op, double dt) : lo(op.lower.size()), di(op.lower.size()), up(op.lower.size()) {
    for (std::size_t i = 1; i < lo.size(); ++i) {
      lo[i] = -dt * op.lower[i];
      di[i] = 1.0 - dt * op.diag[i];
      up[i] = -dt * op.upper[i];
    }
    di[0] = 1.0;
  }

  // out <- solution with right-hand side next + dt h and v_0 = g.
  void solve(std::span<const double> next, std::span<const double> h, double dt, double g,
             std::span<double> out) const {
    out[0] = g;
    for (std::size_t i = 1; i < out.size(); ++i) out[i] = next[i] + dt * h[i];
    solve_tridiagonal(lo, di, up, out);
  }
};

// One pass of the obstacle projection and the increasing-x gradient sweep.
// Returns the sup-norm change.
double project(std::span<double> v, double g, double cap) {
  double change = 0.0;
  double prev = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double before = v[i];
    double z = std::max(v[i], g);
    if (i > 0) z = std::min(z, prev + cap);
    v[i] = z;
    prev = z;
    change = std::max(change, std::abs(z - before));
  }
  return change;
}

class PenalizedStep {
 public:
  PenalizedStep(const GameSpec& spec, const Grid& grid, const PenalizationParams& p)
      : spec_(spec), grid_(grid), p_(p), op_(operator_rows(spec, grid)), linear_(op_, grid.dt), h_(grid.n_x()) {}

  // Residual scaled by dt. Row 0 is the Dirichlet identity.
  void residual(std::span<const double> v, std::span<const double> next, double g,
                std::span<double> out) const {
    const double dt = grid_.dt, dx = grid_.dx, a2 = spec_.alpha0 * spec_.alpha0;
    out[0] = g - v[0];
    for (std::size_t i = 1; i < v.size(); ++i) {
      const double q = (v[i] - v[i - 1]) / dx;
      const double obstacle = std::max(g - v[i], 0.0) / p_.delta;
      const double pen = psi_eps(q * q - a2, p_.eps).value;
      out[i] = next[i] - v[i] + dt * (apply_row(op_, v, i) + h_[i] + obstacle - pen);
    }
  }

  void jacobian(std::span<const double> v, double g, std::vector<double>& lo, std::vector<double>& di,
                std::vector<double>& up) const {
    const double dt = grid_.dt, dx = grid_.dx, a2 = spec_.alpha0 * spec_.alpha0;
    lo[0] = 0.0;
    di[0] = -1.0;
    up[0] = 0.0;
    for (std::size_t i = 1; i < v.size(); ++i) {
      const double q = (v[i] - v[i - 1]) / dx;
      const double dpen = psi_eps(q * q - a2, p_.eps).d1 * 2.0 * q / dx;
      const double dobs = g > v[i] ? 1.0 / p_.delta : 0.0;
      lo[i] = dt * (op_.lower[i] + dpen);
      di[i] = -1.0 + dt * (op_.diag[i] - dobs - dpen);
      up[i] = dt * op_.upper[i];
    }
  }

  void solve(std::size_t n, std::span<const double> next, std::span<double> v) {
    const std::size_t nx = grid_.n_x();
    const double t = grid_.t_nodes[n];
    const double g = spec_.g(t, 0.0);
    for (std::size_t i = 0; i < nx; ++i) h_[i] = spec_.h(t, grid_.x_nodes[i]);
    // The projected step is a cheap guess inside the Newton basin.
    linear_.solve(next, h_, grid_.dt, g, v);
    project(v, g, spec_.alpha0 * grid_.dx);

    std::vector<double> res(nx), trial(nx), trial_res(nx), lo(nx), di(nx), up(nx), step(nx);
    residual(v, next, g, res);
    double merit = sum_sq(res);
    // Residual noise from differencing v at machine precision, amplified by the
    // penalty slopes.
    const double floor = 16.0 * std::numeric_limits<double>::epsilon() * (1.0 + sup_abs(v)) *
                         (1.0 + grid_.dt * (1.0 / p_.delta + 2.0 * (spec_.alpha0 + 1.0) / (p_.eps * grid_.dx)));
    const double tol = std::max(p_.newton_tol, floor);
    for (int it = 0; it < p_.newton_max_iters; ++it) {
      if (sup_abs(res) <= tol) return;
      jacobian(v, g, lo, di, up);
      for (std::size_t i = 0; i < nx; ++i) step[i] = -res[i];
      solve_tridiagonal(lo, di, up, step);
      if (sup_abs(step) <= 1e-13 * (1.0 + sup_abs(v))) return;  // rounding level
      double lambda = 1.0;
      double trial_merit = merit;
      for (; lambda >= 1e-6; lambda *= 0.5) {
        for (std::size_t i = 0; i < nx; ++i) trial[i] = v[i] + lambda * step[i];
        residual(trial, next, g, trial_res);
        trial_merit = sum_sq(trial_res);
        if (trial_merit <= (1.0 - 2e-4 * lambda) * merit) break;
      }
      if (!(trial_merit < merit)) throw NewtonDivergence(n, sup_abs(res));
      std::copy(trial.begin(), trial.end(), v.begin());
      res.swap(trial_res);
      merit = trial_merit;
    }
    if (sup_abs(res) > tol) throw NewtonDivergence(n, sup_abs(res));
  }

 private:
  const GameSpec& spec_;
  const Grid& grid_;
  PenalizationParams p_;
  Stencil op_;
  LinearStep linear_;
  std::vector<double> h_;
};

}  // namespace

// The quintic Hermite bridge for these end conditions has a vanishing s^5
// coefficient.
PsiValue psi_eps(double y, double eps) {
  if (y <= 0.0) return {0.0, 0.0, 0.0};
  if (y >= 2.0 * eps) return {(y - eps) / eps, 1.0 / eps, 0.0};
  const double s = y / (2.0 * eps);
  const double s2 = s * s;
  return {2.0 * s2 * s - s2 * s2, (6.0 * s2 - 4.0 * s2 * s) / (2.0 * eps),
          (12.0 * s - 12.0 * s2) / (4.0 * eps * eps)};
}

void ValueSurface::refresh_derivatives() {
  const std::size_t nt = grid.n_t(), nx = grid.n_x();
  const double dx = grid.dx;
  vx.assign(v.size(), 0.0);
  vxx.assign(v.size(), 0.0);
  for (std::size_t n = 0; n < nt; ++n) {
    const double* row = &v[grid.index(n, 0)];
    double* d1 = &vx[grid.index(n, 0)];
    double* d2 = &vxx[grid.index(n, 0)];
    d1[0] = (row[1] - row[0]) / dx;
    d1[nx - 1] = (row[nx - 1] - row[nx - 2]) / dx;
    for (std::size_t i = 1; i + 1 < nx; ++i) {
      d1[i] = (row[i + 1] - row[i - 1]) / (2.0 * dx);
      d2[i] = (row[i + 1] - 2.0 * row[i] + row[i - 1]) / (dx * dx);
    }
    d2[0] = d2[1];
    d2[nx - 1] = d2[nx - 2];
  }
}

namespace {

// Cell index and weight for linear interpolation on a uniform axis.
std::pair<std::size_t, double> locate(const std::vector<double>& nodes, double step, double z) {
  const double lo = nodes.front();
  z = std::clamp(z, lo, nodes.back());
  std::size_t k = static_cast<std::size_t>(std::floor((z - lo) / step));
  k = std::min(k, nodes.size() - 2);
  const double w = std::clamp((z - nodes[k]) / step, 0.0, 1.0);
  return {k, w};
}

}  // namespace

double ValueSurface::interpolate(double t, double x) const {
  const auto [n, wt] = locate(grid.t_nodes, grid.dt, t);
  const auto [i, wx] = locate(grid.x_nodes, grid.dx, x);
  const double a = (1 - wx) * value(n, i) + wx * value(n, i + 1);
  const double b = (1 - wx) * value(n + 1, i) + wx * value(n + 1, i + 1);
  return (1 - wt) * a + wt * b;
}

double ValueSurface::slope_at(std::size_t n, double x) const {
  const auto [i, w] = locate(grid.x_nodes, grid.dx, x);
  return (1 - w) * slope(n, i) + w * slope(n, i + 1);
}

ValueSurface solve_penalized(const GameSpec& spec, const Grid& grid, const PenalizationParams& params) {
  if (!(params.eps > 0.0 && params.eps < 1.0) || !(params.delta > 0.0 && params.delta < 1.0)) {
    throw ConfigError("penalization: eps and delta must lie in (0, 1)");
  }
  ValueSurface out = make_surface(spec, grid, SchemeKind::Penalized);
  out.penalization = params;
  PenalizedStep stepper(spec, grid, params);
  const std::size_t nx = grid.n_x();
  for (std::size_t n = grid.n_t() - 1; n-- > 0;) {
    std::span<const double> next(&out.v[grid.index(n + 1, 0)], nx);
    std::span<double> cur(&out.v[grid.index(n, 0)], nx);
    stepper.solve(n, next, cur);
  }
  out.refresh_derivatives();
  return out;
}

ValueSurface solve_projected(const GameSpec& spec, const Grid& grid, const ProjectionParams& params) {
  ValueSurface out = make_surface(spec, grid, SchemeKind::Projected);
  const LinearStep linear(operator_rows(spec, grid), grid.dt);
  const std::size_t nx = grid.n_x();
  const double cap = spec.alpha0 * grid.dx;
  std::vector<double> h(nx);
  for (std::size_t n = grid.n_t() - 1; n-- > 0;) {
    const double t = grid.t_nodes[n];
    const double g = out.obstacle[n];
    for (std::size_t i = 0; i < nx; ++i) h[i] = spec.h(t, grid.x_nodes[i]);
    std::span<const double> next(&out.v[grid.index(n + 1, 0)], nx);
    std::span<double> cur(&out.v[grid.index(n, 0)], nx);
    linear.solve(next, h, grid.dt, g, cur);
    double change = 0.0;
    int sweep = 0;
    do {
      if (sweep++ >= params.fp_max) throw FixedPointStall(n, change);
      change = project(cur, g, cap);
    } while (change >= params.fp_tol);
  }
  out.refresh_derivatives();
  return out;
}

ResidualFields residual_check(const ValueSurface& surface, const GameSpec& spec, std::span<const double> a,
                              std::span<const double> b) {
  const Grid& grid = surface.grid;
  const std::size_t nt = grid.n_t(), nx = grid.n_x();
  ResidualFields out;
  out.pde.assign(nt * nx, 0.0);
  out.max_min.assign(nt * nx, 0.0);
  out.min_max.assign(nt * nx, 0.0);
  out.mask.assign(nt * nx, 0);

  const double band = 2.0 * grid.dx;
  const double cell = grid.dx * grid.dt;
  for (std::size_t n = 0; n + 1 < nt; ++n) {
    const double t = grid.t_nodes[n];
    const double g = spec.g(t, 0.0);
    for (std::size_t i = 0; i < nx; ++i) {
      const std::size_t k = grid.index(n, i);
      const double x = grid.x_nodes[i];
      const double s = spec.sigma(x);
      const double vt = n == 0 ? (surface.v[grid.index(1, i)] - surface.v[k]) / grid.dt
                               : (surface.v[grid.index(n + 1, i)] - surface.v[grid.index(n - 1, i)]) / (2.0 * grid.dt);
      const double pde = vt + 0.5 * s * s * surface.vxx[k] + spec.mu(0.0, x) * surface.vx[k] -
                         spec.r * surface.v[k] + spec.h(t, x);
      const double grad = spec.alpha0 - std::abs(surface.vx[k]);
      const double obst = g - surface.v[k];
      out.pde[k] = pde;
      out.max_min[k] = std::max(std::min(pde, grad), obst);
      out.min_max[k] = std::min(std::max(pde, obst), grad);

      if (i < 2 || i + 2 >= nx) continue;
      const auto near = [&](std::span<const double> curve) {
        return n < curve.size() && std::isfinite(curve[n]) && std::abs(x - curve[n]) <= band;
      };
      if (near(a) || near(b)) continue;
      out.mask[k] = 1;
      out.linf_max_min = std::max(out.linf_max_min, std::abs(out.max_min[k]));
      out.linf_min_max = std::max(out.linf_min_max, std::abs(out.min_max[k]));
      out.l1_max_min += std::abs(out.max_min[k]) * cell;
      out.l1_min_max += std::abs(out.min_max[k]) * cell;
    }
  }
  return out;
}

}  // namespace scg
