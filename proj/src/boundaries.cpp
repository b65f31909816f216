#include "scgame/boundaries.hpp"

#include <algorithm>
#include <cmath>

namespace scg {

namespace {

double inf_of(const Grid& grid) { return grid.domain == Domain::HalfLine ? 0.0 : -kInf; }

}  // namespace

double default_gap_tol(const ValueSurface& surface) {
  double gmax = 0.0;
  for (double g : surface.obstacle) gmax = std::max(gmax, std::abs(g));
  return 1e-9 * (1.0 + gmax);
}

std::vector<double> extract_a(const ValueSurface& surface, double gap_tol, std::vector<char>* edge) {
  const Grid& grid = surface.grid;
  const std::size_t nt = grid.n_t(), nx = grid.n_x();
  std::vector<double> a(nt, kInf);
  if (edge) edge->assign(nt, 0);
  for (std::size_t n = 0; n < nt; ++n) {
    const double g = surface.obstacle[n];
    const auto gap = [&](std::size_t i) { return surface.value(n, i) - g; };
    for (std::size_t i = 1; i < nx; ++i) {
      if (!(gap(i) > gap_tol)) continue;
      if (i == 1) {
        a[n] = inf_of(grid);
        if (edge) (*edge)[n] = 1;
      } else {
        const double lo = gap(i - 1), hi = gap(i);
        const double w = std::clamp((gap_tol - lo) / (hi - lo), 0.0, 1.0);
        a[n] = grid.x_nodes[i - 1] + w * grid.dx;
      }
      break;
    }
  }
  return a;
}

std::vector<double> threshold_from_above(const Grid& grid, const std::vector<double>& field, double level,
                                         std::vector<char>* edge) {
  const std::size_t nt = grid.n_t(), nx = grid.n_x();
  std::vector<double> b(nt, inf_of(grid));
  if (edge) edge->assign(nt, 0);
  for (std::size_t n = 0; n < nt; ++n) {
    const double* row = &field[grid.index(n, 0)];
    if (n + 1 == nt || row[nx - 2] < level) {
      b[n] = kInf;
      if (edge) (*edge)[n] = 1;
      continue;
    }
    for (std::size_t i = nx - 2; i-- > 1;) {
      if (!(row[i] < level)) continue;
      const double lo = row[i], hi = row[i + 1];
      const double w = std::clamp((level - lo) / (hi - lo), 0.0, 1.0);
      b[n] = grid.x_nodes[i] + w * grid.dx;
      break;
    }
  }
  return b;
}

std::vector<double> extract_b(const ValueSurface& surface, double grad_tol, std::vector<char>* edge) {
  return threshold_from_above(surface.grid, surface.vx, surface.alpha0 - grad_tol, edge);
}

BoundaryPair extract_boundaries(const ValueSurface& surface, double gap_tol, double grad_tol) {
  BoundaryPair p;
  p.t_nodes = surface.grid.t_nodes;
  p.a = extract_a(surface, gap_tol, &p.a_at_window_edge);
  p.b = extract_b(surface, grad_tol, &p.b_at_window_edge);
  return p;
}

BoundaryPair extract_boundaries(const ValueSurface& surface) {
  return extract_boundaries(surface, default_gap_tol(surface), 1e-3 * surface.alpha0);
}

bool BoundaryReport::all_passed() const {
  return std::all_of(verdicts.begin(), verdicts.end(), [](const PropertyVerdict& v) { return v.passed; });
}

const PropertyVerdict* BoundaryReport::find(const std::string& id) const {
  for (const auto& v : verdicts) {
    if (v.id == id) return &v;
  }
  return nullptr;
}

bool interior_action_condition(const GameSpec& spec, double t, double probe) {
  return spec.h.dx(t, probe) - spec.alpha0 * lambda_fn(spec, probe) < 0.0;
}

namespace {

void fail_at(PropertyVerdict& v, std::size_t n, double observed) {
  if (v.passed) v.first_offending = n;
  v.passed = false;
  v.observed = observed;
}

PropertyVerdict nondecreasing(const std::string& id, const std::vector<double>& c) {
  PropertyVerdict v{id};
  for (std::size_t n = 1; n < c.size(); ++n) {
    if (c[n] < c[n - 1] - 1e-12) {
      fail_at(v, n, c[n] - c[n - 1]);
      break;
    }
  }
  return v;
}

}  // namespace

BoundaryReport check_boundary_properties(const BoundaryPair& pair, const GameSpec& spec,
                                         const ValueSurface& surface, const BoundaryCheckOptions& opts) {
  const Grid& grid = surface.grid;
  const std::size_t nt = pair.a.size();
  const double dx = grid.dx;
  const double fit_tol = opts.fit_tol > 0.0 ? opts.fit_tol : 0.05 * spec.alpha0;
  const double jump_tol = opts.jump_tol > 0.0 ? opts.jump_tol : 5.0 * dx;
  const std::size_t tail = static_cast<std::size_t>(std::ceil(opts.tail_fraction * static_cast<double>(nt)));
  const std::size_t body_end = nt > tail ? nt - tail : 0;  // rows [0, body_end) are resolvable
  const double lo_domain = inf_of(grid);

  BoundaryReport rep;
  std::size_t empty_rows = 0;
  for (std::size_t n = 0; n + 1 < nt; ++n) empty_rows += std::isinf(pair.a[n]) && pair.a[n] > 0;
  if (nt > 1 && empty_rows == nt - 1) {
    rep.degenerate = true;
    rep.notes.push_back("degenerate instance: the continuation region is empty before the horizon");
  }

  rep.verdicts.push_back(nondecreasing("a_nondecreasing", pair.a));
  rep.verdicts.push_back(nondecreasing("b_nondecreasing", pair.b));

  PropertyVerdict below_theta{"a_below_theta_lower"};
  for (std::size_t n = 0; n + 1 < nt; ++n) {
    if (!std::isfinite(pair.a[n])) continue;
    const double tl = theta_lower(spec, grid.t_nodes[n], {grid.x_min(), grid.x_max()});
    if (pair.a[n] > tl + 2.0 * dx) {
      fail_at(below_theta, n, pair.a[n] - tl);
      break;
    }
  }
  rep.verdicts.push_back(below_theta);

  if (spec.domain == Domain::HalfLine) {
    PropertyVerdict positive{"a_positive"};
    for (std::size_t n = 1; n < nt; ++n) {
      if (!(pair.a[n] > 0.0)) {
        fail_at(positive, n, pair.a[n]);
        break;
      }
    }
    rep.verdicts.push_back(positive);
  }

  PropertyVerdict above_inf{"b_above_inf_domain"};
  const double probe = grid.domain == Domain::HalfLine ? 1e-9 : grid.x_min();
  if (interior_action_condition(spec, 0.0, probe)) {
    for (std::size_t n = 1; n < nt; ++n) {
      if (!(pair.b[n] > lo_domain) || (pair.b[n] <= grid.x_nodes[1] && !pair.b_at_window_edge[n])) {
        fail_at(above_inf, n, pair.b[n]);
        break;
      }
    }
  } else {
    above_inf.skipped = true;
    above_inf.note = "sufficient condition for b > inf O does not hold at the domain floor";
  }
  rep.verdicts.push_back(above_inf);

  PropertyVerdict edge{"b_tends_to_window_edge"};
  if (nt >= 2) {
    const std::size_t n = nt - 2;
    const bool reached = pair.b_at_window_edge[n] || pair.b[n] >= grid.x_max() - 5.0 * dx;
    if (!reached) fail_at(edge, n, pair.b[n]);
  }
  rep.verdicts.push_back(edge);

  PropertyVerdict ordered{"a_below_b"};
  for (std::size_t n = 0; n < nt; ++n) {
    if (std::isfinite(pair.a[n]) && std::isfinite(pair.b[n]) && pair.a[n] > lo_domain &&
        !(pair.a[n] < pair.b[n])) {
      fail_at(ordered, n, pair.b[n] - pair.a[n]);
      break;
    }
  }
  rep.verdicts.push_back(ordered);

  PropertyVerdict fit{"smooth_fit"};
  for (std::size_t n = 0; n < body_end; ++n) {
    if (!std::isfinite(pair.a[n]) || pair.a_at_window_edge[n]) continue;
    const double s = std::abs(surface.slope_at(n, pair.a[n]));
    fit.observed = std::max(fit.observed, s);
    if (s > fit_tol && fit.passed) {
      fit.passed = false;
      fit.first_offending = n;
    }
  }
  rep.verdicts.push_back(fit);

  // Continuity heuristics apply where the sufficient conditions hold. A jump
  // is an increment above jump_tol that also exceeds 4x both neighbouring
  // increments; a boundary that is merely steep fails only the first test.
  const auto step_of = [&](const std::vector<double>& c, const std::vector<char>& flag, std::size_t n) {
    if (n == 0 || n >= body_end || !std::isfinite(c[n]) || !std::isfinite(c[n - 1]) || flag[n]) return -1.0;
    return std::abs(c[n] - c[n - 1]);
  };
  const auto scan = [&](const std::string& id, const std::vector<double>& c, const std::vector<char>& flag,
                        auto&& applies) {
    PropertyVerdict v{id};
    for (std::size_t n = 1; n < body_end; ++n) {
      const double j = step_of(c, flag, n);
      if (j < 0.0 || !applies(n)) continue;
      v.observed = std::max(v.observed, j);
      const double side = std::max(step_of(c, flag, n - 1), step_of(c, flag, n + 1));
      if (j > jump_tol && j > 4.0 * side && v.passed) {
        v.passed = false;
        v.first_offending = n;
      }
    }
    return v;
  };
  const PropertyVerdict jump_a = scan("a_bounded_jumps", pair.a, pair.a_at_window_edge, [&](std::size_t n) {
    return spec.h.dx(grid.t_nodes[n], pair.a[n]) > 0.0;
  });
  const PropertyVerdict jump_b = scan("b_bounded_jumps", pair.b, pair.b_at_window_edge, [&](std::size_t n) {
    const double t = grid.t_nodes[n], b = pair.b[n];
    const double hxx = (spec.h.dx(t, b + dx) - spec.h.dx(t, b - dx)) / (2.0 * dx);
    const double mxx = (spec.mu.dx(0.0, b + dx) - spec.mu.dx(0.0, b - dx)) / (2.0 * dx);
    return hxx > 0.0 || mxx > 0.0;
  });
  rep.verdicts.push_back(jump_a);
  rep.verdicts.push_back(jump_b);
  return rep;
}

}  // namespace scg
