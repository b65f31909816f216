#include "scgame/grid.hpp"

#include <cmath>

#include "scgame/errors.hpp"

namespace scg {

bool Grid::same_as(const Grid& other) const {
  return domain == other.domain && t_nodes == other.t_nodes && x_nodes == other.x_nodes;
}

Grid build_grid(const GameSpec& spec, const GridConfig& cfg) {
  if (cfg.n_t < 2) throw ConfigError("grid: n_t must be >= 2");
  if (cfg.n_x < 3) throw ConfigError("grid: n_x must be >= 3");
  if (cfg.spacing != "uniform") throw ConfigError("grid: only uniform spacing is supported");
  if (!(cfg.x_max > cfg.x_min)) throw ConfigError("grid: x_max must exceed x_min");
  if (spec.domain == Domain::HalfLine && cfg.x_min != 0.0) {
    throw ConfigError("grid: the half line requires x_min = 0");
  }

  // Search well beyond the window so that a too-small window is detected rather
  // than mistaken for an empty continuation region.
  const double far = cfg.x_min + 64.0 * (cfg.x_max - cfg.x_min);
  const double lower = theta_lower(spec, 0.0, {cfg.x_min, far});
  Grid grid;
  grid.domain = spec.domain;
  if (std::isfinite(lower) && lower > 0.0) {
    if (cfg.x_max <= lower * cfg.margin_min) {
      throw WindowTooSmall("grid: window edge " + std::to_string(cfg.x_max) +
                           " is too close to theta_lower(0) = " + std::to_string(lower));
    }
    grid.truncation_margin = cfg.x_max / lower;
  } else {
    // Empty continuation region, or theta > 0 already at x_min on the real line.
    grid.truncation_margin = kInf;
  }

  grid.t_nodes.resize(cfg.n_t);
  grid.dt = spec.T / static_cast<double>(cfg.n_t - 1);
  for (std::size_t n = 0; n < cfg.n_t; ++n) grid.t_nodes[n] = grid.dt * static_cast<double>(n);
  grid.t_nodes.back() = spec.T;

  grid.x_nodes.resize(cfg.n_x);
  grid.dx = (cfg.x_max - cfg.x_min) / static_cast<double>(cfg.n_x - 1);
  for (std::size_t i = 0; i < cfg.n_x; ++i) {
    grid.x_nodes[i] = cfg.x_min + grid.dx * static_cast<double>(i);
  }
  grid.x_nodes.back() = cfg.x_max;
  return grid;
}

}  // namespace scg
