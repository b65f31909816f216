#include "psor.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace scg::oracle {

PsorResult solve_stopping_psor(const GameSpec& spec, const Grid& grid, double omega, double tol,
                               std::size_t max_sweeps) {
  const std::size_t nt = grid.n_t(), nx = grid.n_x();
  const double dt = grid.dt, dx = grid.dx;
  PsorResult out;
  out.v.assign(nt * nx, 0.0);

  // Row i of (I - dt A): lo v[i-1] + di v[i] + up v[i+1].
  std::vector<double> lo(nx, 0.0), di(nx, 1.0), up(nx, 0.0);
  for (std::size_t i = 0; i < nx; ++i) {
    const double x = grid.x_nodes[i];
    const double m = spec.mu(0.0, x);
    if (i == 0 && spec.domain == Domain::HalfLine) continue;
    if (i == nx - 1) {
      // mu v_x with a backward difference, no diffusion.
      lo[i] = dt * m / dx;
      di[i] = 1.0 - dt * (m / dx - spec.r);
      continue;
    }
    if (i == 0) throw std::invalid_argument("psor oracle supports the half line only");
    const double s = spec.sigma(x);
    const double D = 0.5 * s * s;
    double a = D / (dx * dx), c = D / (dx * dx);
    if (D / (dx * dx) >= std::abs(m) / (2.0 * dx)) {
      a -= m / (2.0 * dx);
      c += m / (2.0 * dx);
    } else if (m > 0.0) {
      c += m / dx;
    } else {
      a -= m / dx;
    }
    lo[i] = -dt * a;
    up[i] = -dt * c;
    di[i] = 1.0 + dt * (a + c + spec.r);
  }

  for (std::size_t i = 0; i < nx; ++i) out.v[grid.index(nt - 1, i)] = spec.g(grid.T(), 0.0);
  std::vector<double> cur(nx), rhs(nx);
  for (std::size_t n = nt - 1; n-- > 0;) {
    const double t = grid.t_nodes[n];
    const double g = spec.g(t, 0.0);
    for (std::size_t i = 0; i < nx; ++i) {
      cur[i] = out.v[grid.index(n + 1, i)];
      rhs[i] = cur[i] + dt * spec.h(t, grid.x_nodes[i]);
    }
    rhs[0] = g;
    std::size_t sweep = 0;
    for (;; ++sweep) {
      if (sweep >= max_sweeps) throw std::runtime_error("psor oracle did not converge");
      double change = 0.0;
      for (std::size_t i = 0; i < nx; ++i) {
        double r = rhs[i];
        if (i > 0) r -= lo[i] * cur[i - 1];
        if (i + 1 < nx) r -= up[i] * cur[i + 1];
        const double gs = r / di[i];
        const double next = std::max(g, cur[i] + omega * (gs - cur[i]));
        change = std::max(change, std::abs(next - cur[i]));
        cur[i] = next;
      }
      if (change < tol) break;
    }
    out.max_sweeps = std::max(out.max_sweeps, sweep);
    for (std::size_t i = 0; i < nx; ++i) out.v[grid.index(n, i)] = cur[i];
  }
  return out;
}

}  // namespace scg::oracle
