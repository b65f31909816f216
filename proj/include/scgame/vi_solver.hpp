#pragma once

#include <span>
#include <string>
#include <vector>

#include "scgame/grid.hpp"
#include "scgame/model.hpp"

namespace scg {

struct PenalizationParams {
  double eps = 1e-3;
  double delta = 1e-3;
  double newton_tol = 1e-11;
  int newton_max_iters = 60;
};

struct ProjectionParams {
  double fp_tol = 1e-13;
  int fp_max = 500;
};

enum class SchemeKind { Penalized, Projected };

std::string to_string(SchemeKind s);

/// Grid-sampled value with discrete derivatives, stored row-major (time, space).
struct ValueSurface {
  Grid grid;
  std::vector<double> v;
  std::vector<double> vx;
  std::vector<double> vxx;
  std::vector<double> obstacle;  ///< g at each time node
  SchemeKind scheme = SchemeKind::Projected;
  PenalizationParams penalization;  ///< meaningful for the penalized scheme only
  double alpha0 = 0.0;

  double value(std::size_t n, std::size_t i) const { return v[grid.index(n, i)]; }
  double slope(std::size_t n, std::size_t i) const { return vx[grid.index(n, i)]; }

  /// Bilinear interpolation of v; t and x are clamped to the grid.
  double interpolate(double t, double x) const;
  /// Linear interpolation of vx along row n.
  double slope_at(std::size_t n, double x) const;

  /// Recomputes vx (central, one-sided at the edges) and vxx from v.
  void refresh_derivatives();
};

/// C^2 convex non-decreasing penalty: 0 for y <= 0, (y - eps)/eps for y >= 2 eps,
/// and 2 s^3 - s^4 with s = y / (2 eps) in between.
struct PsiValue {
  double value;
  double d1;
  double d2;
};
PsiValue psi_eps(double y, double eps);

/// Backward implicit Euler for the penalised semilinear PDE, damped
/// (semismooth) Newton per step. Throws NewtonDivergence.
ValueSurface solve_penalized(const GameSpec& spec, const Grid& grid, const PenalizationParams& params);

/// Implicit linear step followed by obstacle and gradient projections
/// iterated to a joint fixed point. Throws FixedPointStall.
ValueSurface solve_projected(const GameSpec& spec, const Grid& grid, const ProjectionParams& params = {});

struct ResidualFields {
  std::vector<double> pde;      ///< d_t v + L v - r v + h
  std::vector<double> max_min;  ///< max{min{pde, alpha0 - |vx|}, g - v}
  std::vector<double> min_max;  ///< min{max{pde, g - v}, alpha0 - |vx|}
  std::vector<char> mask;       ///< nodes counted in the summary norms
  double linf_max_min = 0.0;
  double l1_max_min = 0.0;
  double linf_min_max = 0.0;
  double l1_min_max = 0.0;
};

/// Pointwise residuals of both lines of the variational system using the
/// surface's own spatial derivatives and a central time difference (forward on
/// the first row), so that the residual measures truncation error rather than
/// the scheme's own equations. The terminal row is left at zero. Summary norms skip two
/// cells at each window edge and a two-cell band around the boundary curves a
/// and b when given (one entry per time node; non-finite entries ignored).
ResidualFields residual_check(const ValueSurface& surface, const GameSpec& spec,
                              std::span<const double> a = {}, std::span<const double> b = {});

}  // namespace scg
