#pragma once

#include <vector>

#include "scgame/grid.hpp"
#include "scgame/model.hpp"
#include "scgame/vi_solver.hpp"

namespace scg {

/// Condition imposed on the auxiliary problem at the stopping boundary.
/// Absorb is the representation of v_x; Reflect exists only as a negative
/// control for tests.
enum class AuxBoundary { Absorb, Reflect };

struct AuxSurface {
  Grid grid;
  std::vector<double> w;
  std::vector<char> absorbed_mask;  ///< x <= a(t)
  std::vector<double> a;            ///< absorption curve used, one per time node
  double alpha0 = 0.0;
  AuxBoundary boundary = AuxBoundary::Absorb;

  double value(std::size_t n, std::size_t i) const { return w[grid.index(n, i)]; }
};

/// Backward implicit solve of
///   min{ d_t w + G w + h_x, alpha0 - w } = 0   on x > a(t),
///   G = (sigma^2/2) d_xx + (sigma sigma_x + mu) d_x - (r - mu_x),
/// with w = 0 on x <= a(t) and at t = T. The cap is handled exactly per step by
/// policy iteration. The row at x_max uses w_x = 0, matching the zero-curvature
/// edge of the value solvers. The first free node uses a non-uniform stencil
/// reaching back to a(t); a node closer than 0.05 dx to a(t) is absorbed.
AuxSurface solve_aux(const GameSpec& spec, const Grid& grid, const std::vector<double>& a_values,
                     AuxBoundary boundary = AuxBoundary::Absorb);

struct Discrepancy {
  double sup = 0.0;
  double l1 = 0.0;  ///< weighted by dx dt
  std::size_t count = 0;
  std::size_t worst_n = 0;
  std::size_t worst_i = 0;
  double worst_t = 0.0;
  double worst_x = 0.0;
};

/// |w - vx| on nodes with x > a(t) + 2 dx, excluding two cells at the right
/// edge. Throws GridMismatch when the grids differ.
Discrepancy compare_vx(const AuxSurface& aux, const ValueSurface& surface);

/// Largest x with w < alpha0 - grad_tol per time row (+inf at t = T and when
/// the window edge still qualifies).
std::vector<double> sigma_star_curve(const AuxSurface& aux, double grad_tol,
                                     std::vector<char>* edge = nullptr);

}  // namespace scg
