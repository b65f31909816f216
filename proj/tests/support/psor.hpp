#pragma once

#include <vector>

#include "scgame/grid.hpp"
#include "scgame/model.hpp"

namespace scg::oracle {

struct PsorResult {
  std::vector<double> v;  ///< row-major (time, space)
  std::size_t max_sweeps = 0;
};

/// Pure optimal stopping max{d_t v + L v - r v + h, g - v} = 0 by implicit
/// Euler and projected SOR, with v = g at x_min on the half line and the
/// zero-curvature row (d_t v + mu v_x - r v + h = 0, backward difference) at
/// x_max. Shares no code with the library solvers.
PsorResult solve_stopping_psor(const GameSpec& spec, const Grid& grid, double omega = 1.6, double tol = 1e-13,
                               std::size_t max_sweeps = 200000);

}  // namespace scg::oracle
