#pragma once

#include <optional>
#include <string>
#include <vector>

#include "scgame/model.hpp"
#include "scgame/vi_solver.hpp"

namespace scg {

/// Stopping boundary a and action boundary b at the grid times.
/// -inf/+inf mark empty sets; window-edge flags mark values that the
/// truncation prevents from resolving.
struct BoundaryPair {
  std::vector<double> t_nodes;
  std::vector<double> a;
  std::vector<double> b;
  std::vector<char> a_at_window_edge;
  std::vector<char> b_at_window_edge;
};

/// 1e-9 (1 + max |g|). Penalized surfaces sit below g in the stopping region,
/// so a rounding-level tolerance suits both schemes.
double default_gap_tol(const ValueSurface& surface);

/// Smallest x with v - g > gap_tol per time row, refined by linear
/// interpolation inside the bracketing cell.
std::vector<double> extract_a(const ValueSurface& surface, double gap_tol, std::vector<char>* edge = nullptr);

/// Largest x with vx < alpha0 - grad_tol per time row, refined the same way.
/// +inf (edge flag) when the last interior node still qualifies and at t = T.
std::vector<double> extract_b(const ValueSurface& surface, double grad_tol, std::vector<char>* edge = nullptr);

/// Same threshold rule as extract_b applied to an arbitrary gradient field.
std::vector<double> threshold_from_above(const Grid& grid, const std::vector<double>& field, double level,
                                         std::vector<char>* edge);

BoundaryPair extract_boundaries(const ValueSurface& surface);
BoundaryPair extract_boundaries(const ValueSurface& surface, double gap_tol, double grad_tol);

struct PropertyVerdict {
  PropertyVerdict() = default;
  explicit PropertyVerdict(std::string verdict_id) : id(std::move(verdict_id)) {}

  std::string id;
  bool passed = true;
  bool skipped = false;
  std::optional<std::size_t> first_offending;  ///< time index
  double observed = 0.0;                       ///< worst value seen
  std::string note;
};

struct BoundaryCheckOptions {
  double fit_tol = 0.0;   ///< 0 selects 0.05 alpha0
  double jump_tol = 0.0;  ///< 0 selects 5 dx; see check_boundary_properties for the jump rule
  double tail_fraction = 0.05;  ///< trailing share of rows excluded from fit and jump checks
};

struct BoundaryReport {
  std::vector<PropertyVerdict> verdicts;
  bool degenerate = false;
  std::vector<std::string> notes;

  bool all_passed() const;
  const PropertyVerdict* find(const std::string& id) const;
};

BoundaryReport check_boundary_properties(const BoundaryPair& pair, const GameSpec& spec,
                                         const ValueSurface& surface, const BoundaryCheckOptions& opts = {});

/// Sufficient condition for b > inf O: h_x - alpha0 lambda < 0 just above inf O
/// (evaluated at `probe`, typically the first interior node).
bool interior_action_condition(const GameSpec& spec, double t, double probe);

}  // namespace scg
