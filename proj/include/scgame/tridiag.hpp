#pragma once

#include <functional>
#include <span>
#include <vector>

#include "scgame/grid.hpp"

namespace scg {

/// Thomas algorithm. Solves lower[i] x[i-1] + diag[i] x[i] + upper[i] x[i+1] = rhs[i]
/// in place (rhs becomes the solution). lower[0] and upper[n-1] are ignored.
void solve_tridiagonal(std::span<const double> lower, std::span<const double> diag,
                       std::span<const double> upper, std::span<double> rhs);

/// Three-point discretisation of  D(x) f'' + m(x) f' - c(x) f  on the grid's
/// x nodes. Central differences where diffusion dominates the cell Peclet
/// number, first-order upwinding otherwise, so off-diagonals stay non-negative.
struct Stencil {
  std::vector<double> lower;
  std::vector<double> diag;
  std::vector<double> upper;

  double apply(std::span<const double> f, std::size_t i) const {
    return lower[i] * f[i - 1] + diag[i] * f[i] + upper[i] * f[i + 1];
  }
};

Stencil build_stencil(const Grid& grid, const std::function<double(double)>& diffusion,
                      const std::function<double(double)>& drift,
                      const std::function<double(double)>& rate);

}  // namespace scg
