#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "scgame/model.hpp"

namespace scg {

struct GridConfig {
  std::size_t n_t = 101;
  std::size_t n_x = 401;
  double x_min = 0.0;
  double x_max = 6.0;
  std::string spacing = "uniform";
  double margin_min = 2.0;
};

/// Uniform space-time lattice on [0, T] x [x_min, x_max]. Immutable once built.
struct Grid {
  Domain domain = Domain::HalfLine;
  std::vector<double> t_nodes;
  std::vector<double> x_nodes;
  double dt = 0.0;
  double dx = 0.0;
  /// x_max / theta_lower(0); +inf when theta_lower(0) is not positive.
  double truncation_margin = 0.0;

  std::size_t n_t() const { return t_nodes.size(); }
  std::size_t n_x() const { return x_nodes.size(); }
  double T() const { return t_nodes.back(); }
  double x_min() const { return x_nodes.front(); }
  double x_max() const { return x_nodes.back(); }
  std::size_t index(std::size_t n, std::size_t i) const { return n * x_nodes.size() + i; }

  bool same_as(const Grid& other) const;
};

/// Throws WindowTooSmall when x_max <= theta_lower(0) * margin_min and
/// ConfigError for malformed settings.
Grid build_grid(const GameSpec& spec, const GridConfig& cfg);

}  // namespace scg
