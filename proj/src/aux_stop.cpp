#include "scgame/aux_stop.hpp"

#include <algorithm>
#include <cmath>

#include "scgame/boundaries.hpp"
#include "scgame/errors.hpp"
#include "scgame/tridiag.hpp"

namespace scg {

namespace {

struct Row {
  double lo, ce, up;
};

// D f'' + m f' at a node with neighbours hl to the left and hr to the right.
// Falls back to upwinding when central weights would turn negative.
Row three_point(double D, double m, double hl, double hr) {
  const double s = hl + hr;
  Row r{2.0 * D / (hl * s) - m * hr / (hl * s), 0.0, 2.0 * D / (hr * s) + m * hl / (hr * s)};
  if (r.lo < 0.0 || r.up < 0.0) {
    r.lo = 2.0 * D / (hl * s) + (m < 0.0 ? -m / hl : 0.0);
    r.up = 2.0 * D / (hr * s) + (m > 0.0 ? m / hr : 0.0);
  }
  r.ce = -r.lo - r.up;
  return r;
}

}  // namespace

AuxSurface solve_aux(const GameSpec& spec, const Grid& grid, const std::vector<double>& a_values,
                     AuxBoundary boundary) {
  const std::size_t nt = grid.n_t(), nx = grid.n_x();
  if (a_values.size() != nt) throw GridMismatch("solve_aux: boundary length differs from the time grid");
  AuxSurface out;
  out.grid = grid;
  out.alpha0 = spec.alpha0;
  out.boundary = boundary;
  out.a = a_values;
  out.w.assign(nt * nx, 0.0);
  out.absorbed_mask.assign(nt * nx, 1);

  const double dt = grid.dt, dx = grid.dx, cap = spec.alpha0;
  std::vector<double> D(nx), m(nx), lam(nx);
  for (std::size_t i = 0; i < nx; ++i) {
    const double x = grid.x_nodes[i];
    const double s = spec.sigma(x);
    D[i] = 0.5 * s * s;
    m[i] = s * spec.sigma_x(x) + spec.mu(0.0, x);
    lam[i] = lambda_fn(spec, x);
  }

  std::vector<double> lo(nx), di(nx), up(nx), sol(nx), src(nx);
  std::vector<char> capped(nx);
  for (std::size_t n = nt - 1; n-- > 0;) {
    const double t = grid.t_nodes[n];
    const double a = a_values[n];
    if (std::isinf(a) && a > 0) continue;  // fully absorbed row

    std::size_t first = 0;
    double hl = dx;
    while (first < nx && grid.x_nodes[first] <= a) ++first;
    if (first > 0) {
      hl = grid.x_nodes[first] - a;
      if (hl < 0.05 * dx) {
        ++first;
        hl += dx;
      }
    }
    if (first >= nx) continue;

    const double* next = &out.w[grid.index(n + 1, 0)];
    // Generator rows G, identity rows on absorbed nodes.
    for (std::size_t i = 0; i < nx; ++i) {
      src[i] = next[i] + dt * spec.h.dx(t, grid.x_nodes[i]);
      if (i < first) {
        lo[i] = 0.0, di[i] = 1.0, up[i] = 0.0;
        continue;
      }
      Row r{};
      if (i + 1 == nx) {
        // w_x = 0 through the mirror ghost node.
        r = {2.0 * D[i] / (dx * dx), -2.0 * D[i] / (dx * dx), 0.0};
      } else if (i == first && first > 0) {
        r = three_point(D[i], m[i], hl, dx);
        if (boundary == AuxBoundary::Reflect) r.ce += r.lo;
        r.lo = 0.0;  // absorbed neighbour value is zero
      } else if (i == 0) {
        r = three_point(D[i], m[i], dx, dx);
        r.ce += r.lo;
        r.lo = 0.0;
      } else {
        r = three_point(D[i], m[i], dx, dx);
      }
      lo[i] = -dt * r.lo;
      di[i] = 1.0 - dt * (r.ce - lam[i]);
      up[i] = -dt * r.up;
    }

    // Policy iteration on the cap.
    std::fill(capped.begin(), capped.end(), 0);
    for (std::size_t iter = 0;; ++iter) {
      std::vector<double> l2 = lo, d2 = di, u2 = up;
      for (std::size_t i = 0; i < nx; ++i) {
        if (i < first) {
          sol[i] = 0.0;
        } else if (capped[i]) {
          l2[i] = 0.0, d2[i] = 1.0, u2[i] = 0.0;
          sol[i] = cap;
        } else {
          sol[i] = src[i];
        }
      }
      solve_tridiagonal(l2, d2, u2, sol);
      bool changed = false;
      for (std::size_t i = first; i < nx; ++i) {
        double Mw = di[i] * sol[i];
        if (i > 0) Mw += lo[i] * sol[i - 1];
        if (i + 1 < nx) Mw += up[i] * sol[i + 1];
        const char want = (cap - sol[i]) < (src[i] - Mw) ? 1 : 0;
        if (want != capped[i]) {
          capped[i] = want;
          changed = true;
        }
      }
      if (!changed) break;
      if (iter > nx) throw FixedPointStall(n, 0.0);
    }
    for (std::size_t i = 0; i < nx; ++i) {
      out.w[grid.index(n, i)] = i < first ? 0.0 : sol[i];
      out.absorbed_mask[grid.index(n, i)] = i < first ? 1 : 0;
    }
  }
  return out;
}

Discrepancy compare_vx(const AuxSurface& aux, const ValueSurface& surface) {
  if (!aux.grid.same_as(surface.grid)) throw GridMismatch("compare_vx: surfaces live on different grids");
  const Grid& grid = aux.grid;
  const std::size_t nt = grid.n_t(), nx = grid.n_x();
  Discrepancy d;
  for (std::size_t n = 0; n < nt; ++n) {
    const double a = aux.a[n];
    if (std::isinf(a) && a > 0) continue;
    for (std::size_t i = 0; i + 2 < nx; ++i) {
      const double x = grid.x_nodes[i];
      if (!(x > a + 2.0 * grid.dx)) continue;
      const std::size_t k = grid.index(n, i);
      const double e = std::abs(aux.w[k] - surface.vx[k]);
      ++d.count;
      d.l1 += e * grid.dx * grid.dt;
      if (e > d.sup) {
        d.sup = e;
        d.worst_n = n, d.worst_i = i;
        d.worst_t = grid.t_nodes[n], d.worst_x = x;
      }
    }
  }
  return d;
}

std::vector<double> sigma_star_curve(const AuxSurface& aux, double grad_tol, std::vector<char>* edge) {
  return threshold_from_above(aux.grid, aux.w, aux.alpha0 - grad_tol, edge);
}

}  // namespace scg
