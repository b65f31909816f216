// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <omp.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "psor.hpp"
#include "scgame/aux_stop.hpp"
#include "scgame/boundaries.hpp"
#include "scgame/config.hpp"
#include "scgame/game_sim.hpp"
#include "scgame/grid.hpp"
#include "scgame/io.hpp"
#include "scgame/pipeline.hpp"
#include "scgame/sde.hpp"
#include "scgame/vi_solver.hpp"

using namespace scg;
namespace fs = std::filesystem;

namespace {

// Pinned tolerances.
constexpr double kShapeSlack = 1e-7;          // convexity and monotonicity in x
constexpr double kPenaltyFloor = 10.0;        // v >= g - 10 delta; time monotonicity of v - g
constexpr double kGradRel = 1e-3;             // vx <= alpha0 (1 + 1e-3)
constexpr double kCrossScheme = 5e-3;         // penalized(1e-3) vs projected
constexpr double kSmoothFitRel = 0.05;        // |vx(t, a)| <= 0.05 alpha0
constexpr double kAuxRel = 0.05;              // |w - vx| <= 0.05 alpha0
constexpr double kSigmaStarCells = 3.0;       // sigma* vs b in dx
constexpr double kPicardTol = 1e-6;           // one-pass vs Picard, sup norm
constexpr double kPsorTol = 2e-3;             // alpha0 = 1e6 vs PSOR, sup norm
constexpr double kConvexityTol = 1e-9;        // trajectory convexity
constexpr double kAllowanceC = 0.0132;        // calibrated with tools/calibrate_allowance, seed 777
constexpr std::size_t kPaths = 100000;
constexpr std::size_t kSteps = 200;
constexpr std::uint64_t kSeed = 20240601;

using Clock = std::chrono::steady_clock;

GameSpec bench(double alpha0) { return benchmark_spec(1, 1, 0.05, 0.4, {0.1, alpha0, 1.0}); }
Grid fine_grid(const GameSpec& spec) { return build_grid(spec, {201, 801, 0.0, 4.0}); }

PenalizationParams pen(double e) {
  PenalizationParams p;
  p.eps = p.delta = e;
  return p;
}

struct Outcome {
  bool passed = true;
  std::vector<std::string> details;

  void check(bool ok, const std::string& what) {
    passed = passed && ok;
    details.push_back(std::string(ok ? "ok   " : "FAIL ") + what);
  }
};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

// Criterion 1 on one surface.
void structural(Outcome& out, const ValueSurface& s, double delta, const std::string& tag) {
  const Grid& g = s.grid;
  const std::size_t nt = g.n_t(), nx = g.n_x();
  const double a0 = s.alpha0;
  double worst_obstacle = 0.0, worst_grad_lo = 0.0, worst_grad_hi = 0.0, worst_convex = 0.0, worst_incr = 0.0,
         worst_t_gap = 0.0, worst_t_vx = 0.0;
  for (std::size_t n = 0; n < nt; ++n) {
    for (std::size_t i = 0; i < nx; ++i) {
      worst_obstacle = std::max(worst_obstacle, s.obstacle[n] - s.value(n, i));
      // Node 1 differences against the Dirichlet node, which the penalty does not relax.
      if (i >= 2 && i + 1 < nx) {
        worst_grad_lo = std::max(worst_grad_lo, -s.slope(n, i));
        worst_grad_hi = std::max(worst_grad_hi, s.slope(n, i) - a0 * (1.0 + kGradRel));
        worst_convex = std::max(worst_convex, -(s.value(n, i + 1) - 2.0 * s.value(n, i) + s.value(n, i - 1)));
      }
      if (i >= 2) worst_incr = std::max(worst_incr, s.value(n, i - 1) - s.value(n, i));
      if (n + 1 < nt && i >= 2) {
        const double gap_now = s.value(n, i) - s.obstacle[n];
        const double gap_next = s.value(n + 1, i) - s.obstacle[n + 1];
        worst_t_gap = std::max(worst_t_gap, gap_next - gap_now);
        if (i + 1 < nx) worst_t_vx = std::max(worst_t_vx, s.slope(n + 1, i) - s.slope(n, i));
      }
    }
  }
  const double floor = kPenaltyFloor * delta;
  out.check(worst_obstacle <= floor, tag + ": v >= g - 10 delta (worst g - v " + num(worst_obstacle) + ")");
  out.check(worst_grad_lo <= kShapeSlack && worst_grad_hi <= 0.0,
            tag + ": 0 <= vx <= alpha0 (1 + 1e-3) (worst below 0 " + num(worst_grad_lo) + ", above cap " +
                num(worst_grad_hi) + ")");
  out.check(worst_convex <= kShapeSlack, tag + ": convex in x (worst " + num(worst_convex) + ")");
  out.check(worst_incr <= kShapeSlack, tag + ": nondecreasing in x (worst " + num(worst_incr) + ")");
  out.check(worst_t_gap <= kShapeSlack + floor, tag + ": t -> v - g nonincreasing (worst " + num(worst_t_gap) + ")");
  out.check(worst_t_vx <= kShapeSlack, tag + ": t -> vx nonincreasing (worst " + num(worst_t_vx) + ")");
}

double sup_interior(const ValueSurface& a, const ValueSurface& b) {
  const Grid& g = a.grid;
  double d = 0.0;
  for (std::size_t n = 0; n < g.n_t(); ++n)
    for (std::size_t i = 2; i + 2 < g.n_x(); ++i) d = std::max(d, std::abs(a.value(n, i) - b.value(n, i)));
  return d;
}

double sup_all(const std::vector<double>& a, const std::vector<double>& b) {
  double d = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) d = std::max(d, std::abs(a[k] - b[k]));
  return d;
}

struct Shared {
  GameSpec spec = bench(2.0);
  ValueSurface penalized;  // eps = delta = 1e-6
  ValueSurface projected;
  BoundaryPair pen_bp;
  BoundaryPair proj_bp;
};

Outcome criterion1(const Shared& sh) {
  Outcome o;
  structural(o, sh.penalized, 1e-6, "penalized eps=1e-6");
  structural(o, sh.projected, 0.0, "projected");
  return o;
}

Outcome criterion2(const Shared& sh) {
  Outcome o;
  const Grid& g = sh.projected.grid;
  std::vector<double> gaps;
  for (double e : {1e-2, 3e-3, 1e-3}) gaps.push_back(sup_interior(solve_penalized(sh.spec, g, pen(e)), sh.projected));
  o.check(gaps.back() <= kCrossScheme, "sup |v_pen(1e-3) - v_proj| = " + num(gaps.back()) + " <= 5e-3");
  o.check(gaps[0] > gaps[1] && gaps[1] > gaps[2],
          "gap decreases along eps: " + num(gaps[0]) + ", " + num(gaps[1]) + ", " + num(gaps[2]));
  return o;
}

Outcome criterion3(const Shared& sh) {
  Outcome o;
  BoundaryCheckOptions opts;
  opts.fit_tol = kSmoothFitRel * sh.spec.alpha0;
  for (const auto& [tag, s, bp] : {std::tuple{"penalized", &sh.penalized, &sh.pen_bp},
                                   std::tuple{"projected", &sh.projected, &sh.proj_bp}}) {
    const auto rep = check_boundary_properties(*bp, sh.spec, *s, opts);
    for (const auto& v : rep.verdicts) {
      std::string line = std::string(tag) + ": " + v.id + (v.skipped ? " (skipped: " + v.note + ")" : "");
      if (!v.passed && v.first_offending) line += " at row " + std::to_string(*v.first_offending);
      line += " observed " + num(v.observed);
      o.check(v.passed, line);
    }
  }
  return o;
}

Outcome criterion4(const Shared& sh) {
  Outcome o;
  std::vector<double> sups;
  for (std::size_t k : {1, 2}) {
    const Grid g = build_grid(sh.spec, {50 * k + 1, 200 * k + 1, 0.0, 4.0});
    const auto s = solve_penalized(sh.spec, g, pen(1e-6));
    sups.push_back(compare_vx(solve_aux(sh.spec, g, extract_boundaries(s).a), s).sup);
  }
  const Grid& g = sh.penalized.grid;
  const auto aux = solve_aux(sh.spec, g, sh.pen_bp.a);
  const auto d = compare_vx(aux, sh.penalized);
  sups.push_back(d.sup);
  o.check(d.sup <= kAuxRel * sh.spec.alpha0, "sup |w - vx| = " + num(d.sup) + " <= 0.05 alpha0 at 201x801");
  o.check(sups[0] > sups[1] && sups[1] > sups[2],
          "decreasing under refinement: " + num(sups[0]) + ", " + num(sups[1]) + ", " + num(sups[2]));

  std::vector<char> edge;
  const auto sig = sigma_star_curve(aux, 1e-3 * sh.spec.alpha0, &edge);
  double worst = 0.0;
  std::size_t rows = 0;
  for (std::size_t n = 0; n + 1 < sig.size(); ++n) {
    if (edge[n] || sh.pen_bp.b_at_window_edge[n]) continue;
    worst = std::max(worst, std::abs(sig[n] - sh.pen_bp.b[n]));
    ++rows;
  }
  o.check(rows > 0 && worst <= kSigmaStarCells * g.dx,
          "sigma_star vs b: max " + num(worst) + " <= 3 dx over " + std::to_string(rows) + " rows");

  const auto refl = compare_vx(solve_aux(sh.spec, g, sh.pen_bp.a, AuxBoundary::Reflect), sh.penalized);
  o.check(refl.sup > d.sup, "reflection worsens the discrepancy: " + num(refl.sup) + " > " + num(d.sup));
  return o;
}

Outcome criterion5(const Shared& sh) {
  Outcome o;
  std::mt19937_64 rng(5);
  std::normal_distribution<double> z(0.0, 1.0);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::size_t bad_level = 0, bad_mono = 0, bad_flat = 0;
  for (int trial = 0; trial < 10000; ++trial) {
    const std::size_t n = 100;
    const double dt = 0.01;
    std::vector<double> inc(n);
    for (double& d : inc) d = 0.3 * z(rng) * std::sqrt(dt) + 0.2 * (u(rng) - 0.5) * dt;
    std::vector<double> ft(n + 1), fv(n + 1);
    double level = 0.5 + u(rng);
    for (std::size_t k = 0; k <= n; ++k) {
      ft[k] = static_cast<double>(k) * dt;
      level += 0.05 * (u(rng) - 0.4);
      fv[k] = level;
    }
    const StepCurve f(ft, fv, u(rng) < 0.5 ? StepCurve::Side::Left : StepCurve::Side::Right);
    const double x0 = 2.0 * u(rng);
    const auto p = skorokhod_reflect_driver(inc, f, 0.0, x0, dt);
    for (std::size_t k = 0; k <= n; ++k) {
      const double fk = f(p.times[k]);
      if (p.x[k] > fk + 1e-12) ++bad_level;
      if (k > 0 && p.nu[k] > p.nu[k - 1]) ++bad_mono;
      if (k > 0 && p.x[k] < fk - 1e-12 && p.nu[k] != p.nu[k - 1]) ++bad_flat;
    }
    if (p.nu[0] > 0.0) ++bad_mono;
  }
  o.check(bad_level == 0, "state <= boundary on 1e4 drivers (" + std::to_string(bad_level) + " violations)");
  o.check(bad_mono == 0, "nu nonincreasing (" + std::to_string(bad_mono) + " violations)");
  o.check(bad_flat == 0, "nu flat off the boundary (" + std::to_string(bad_flat) + " violations)");

  const double dt = 1e-4;
  const GameCurves curves = curves_from(sh.pen_bp);
  double worst = 0.0;
  for (std::size_t p = 0; p < 100; ++p) {
    const auto dW = brownian_increments(10000, dt, path_seed(kSeed + 5, p));
    const auto one = skorokhod_reflect(sh.spec, dW, curves.b, 0.0, 1.0, dt);
    const auto fix = skorokhod_reflect(sh.spec, dW, curves.b, 0.0, 1.0, dt, {ReflectionMode::Picard});
    worst = std::max(worst, sup_all(one.x, fix.x));
  }
  o.check(worst <= kPicardTol, "one-pass vs Picard at dt=1e-4 on 100 paths: " + num(worst) + " <= 1e-6");
  return o;
}

Outcome criterion6(const Shared& sh) {
  Outcome o;
  SuiteConfig cfg;
  cfg.sim = {kPaths, kSteps, kSeed, false};
  cfg.allowance_c = kAllowanceC;
  const auto rep = deviation_suite(sh.spec, sh.penalized, sh.pen_bp, 0.0, 1.0, cfg);
  o.check(rep.equilibrium_passed, "|J(eq) - v| = " + num(std::abs(rep.equilibrium.mean - rep.v_pde)) +
                                      " <= 3 se + allowance = " + num(rep.equilibrium_margin));
  for (const auto& d : rep.deviations)
    o.check(d.passed, d.player + " / " + d.name + ": diff " + num(d.diff) + " (se " + num(d.diff_se) + ", margin " +
                          num(d.margin) + ")" + (d.strict ? " strict" : ""));
  o.check(rep.strict_stopper(), "a stopper deviation is strictly suboptimal by > 5 se");
  o.check(rep.strict_controller(), "a controller deviation is strictly suboptimal by > 5 se");
  return o;
}

Outcome criterion7() {
  Outcome o;
  {
    GameSpec spec;
    spec.mu = ScalarFn::parse("0.05 * x");
    spec.sigma1 = 0.4;
    spec.g = ScalarFn::constant(0.0);
    spec.h = ScalarFn::constant(-1.0);
    spec.r = 0.1;
    spec.alpha0 = 2.0;
    spec.family = "theta_nonpositive";
    spec.validate();
    const Grid g = fine_grid(spec);
    const double delta = 1e-3;
    const double pen_gap = sup_all(solve_penalized(spec, g, pen(delta)).v, std::vector<double>(g.n_t() * g.n_x(), 0.0));
    const double proj_gap = sup_all(solve_projected(spec, g).v, std::vector<double>(g.n_t() * g.n_x(), 0.0));
    o.check(pen_gap <= kPenaltyFloor * delta, "theta <= 0: penalized sup |v - g| = " + num(pen_gap) + " <= 10 delta");
    o.check(proj_gap == 0.0, "theta <= 0: projected sup |v - g| = " + num(proj_gap));
  }
  const auto spec = bench(1e6);
  const Grid g = fine_grid(spec);
  const auto oracle = oracle::solve_stopping_psor(spec, g);
  const auto s = solve_penalized(spec, g, pen(1e-6));
  const double d = sup_all(s.v, oracle.v);
  o.check(d <= kPsorTol, "alpha0 = 1e6 vs PSOR: sup " + num(d) + " <= 2e-3");

  ValueSurface os = s;
  os.v = oracle.v;
  os.refresh_derivatives();
  const BoundaryPair bp = extract_boundaries(os);
  const StrategyPair stop_only{"stop at a, no control", {}, {ControlRule::Kind::NoControl}};
  const auto e = estimate_value(spec, curves_from(bp), stop_only, 0.0, 1.0, {kPaths, kSteps, kSeed + 7, false});
  const double v = os.interpolate(0.0, 1.0);
  const double margin = 3.0 * e.se + kAllowanceC * (std::sqrt(spec.T / kSteps) + g.dx);
  o.check(std::abs(e.mean - v) <= margin,
          "alpha0 = 1e6 Monte Carlo vs PSOR: |J - v| = " + num(std::abs(e.mean - v)) + " <= " + num(margin));
  return o;
}

Outcome criterion8() {
  Outcome o;
  const std::vector<std::pair<std::string, GameSpec>> models{
      {"benchmark", bench(2.0)}, {"power_drift", power_drift_spec(2.0, 3.0, 0.5, 1.0, 1.0, 0.4, {0.1, 2.0, 1.0})}};
  for (const auto& [name, spec] : models) {
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const std::size_t n = 200;
    const double dt = spec.T / static_cast<double>(n);
    double worst = 0.0;
    for (std::size_t trial = 0; trial < 1000; ++trial) {
      const double lam = u(rng), x1 = 0.2 + 2.8 * u(rng), x2 = 0.2 + 2.8 * u(rng);
      const double c1 = u(rng), c2 = u(rng), jump1 = 0.2 * u(rng), jump2 = 0.2 * u(rng);
      std::vector<double> nu1(n + 1), nu2(n + 1), nul(n + 1);
      for (std::size_t k = 0; k <= n; ++k) {
        const double t = static_cast<double>(k) * dt;
        nu1[k] = -std::min(jump1, x1) - c1 * t;
        nu2[k] = -std::min(jump2, x2) - c2 * t * t;
        nul[k] = lam * nu1[k] + (1.0 - lam) * nu2[k];
      }
      const auto dW = brownian_increments(n, dt, path_seed(kSeed + 8, trial));
      const auto p1 = simulate_controlled(spec, dW, nu1, 0.0, x1, dt);
      const auto p2 = simulate_controlled(spec, dW, nu2, 0.0, x2, dt);
      const auto pl = simulate_controlled(spec, dW, nul, 0.0, lam * x1 + (1.0 - lam) * x2, dt);
      for (std::size_t k = 0; k <= n; ++k)
        worst = std::max(worst, pl.x[k] - (lam * p1.x[k] + (1.0 - lam) * p2.x[k]));
    }
    o.check(worst <= kConvexityTol, name + ": max (X^lambda - mix) = " + num(worst) + " on 1e3 triples");
  }
  return o;
}

std::vector<std::pair<std::string, std::string>> tree(const fs::path& root) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& e : fs::recursive_directory_iterator(root))
    if (e.is_regular_file()) out.emplace_back(fs::relative(e.path(), root).generic_string(), read_file(e.path()));
  std::sort(out.begin(), out.end());
  return out;
}

Outcome criterion9(const Shared& sh) {
  Outcome o;
  RunConfig cfg = parse_config(json::parse(R"({
    "model": {"family": "benchmark", "alpha0": 2.0},
    "grid": {"n_t": 51, "n_x": 201, "x_max": 4.0},
    "solver": {"eps_schedule": [1e-3, 1e-6]},
    "simulation": {"n_paths": 5000, "n_steps": 50, "seed": 11, "allowance_c": 0.0132}
  })"));
  const fs::path base = fs::temp_directory_path() / "scgame_acceptance_determinism";
  fs::remove_all(base);
  const int saved = omp_get_max_threads();
  std::vector<std::vector<std::pair<std::string, std::string>>> trees;
  for (int threads : {1, 4}) {
    omp_set_num_threads(threads);
    const StageOptions opts{base / ("threads" + std::to_string(threads)), false, nullptr};
    run_solve(cfg, opts);
    run_aux(cfg, opts);
    run_simulate(cfg, opts);
    run_verify(cfg, opts);
    trees.push_back(tree(opts.out_dir));
  }
  omp_set_num_threads(saved);
  o.check(!trees[0].empty() && trees[0] == trees[1],
          "pipeline outputs byte-identical with 1 and 4 threads (" + std::to_string(trees[0].size()) + " files)");
  fs::remove_all(base);

  const std::vector<StrategyPair> pairs{{}, {"no control", {}, {ControlRule::Kind::NoControl}}};
  const SimConfig sim{20000, kSteps, kSeed, false};
  const auto curves = curves_from(sh.pen_bp);
  const auto par = payoff_samples(sh.spec, curves, pairs, 0.0, 1.0, sim);
  const auto ser = payoff_samples_serial(sh.spec, curves, pairs, 0.0, 1.0, sim);
  o.check(par == ser, "OpenMP and serial payoff samples identical on 2e4 paths");
  return o;
}

}  // namespace

int main() {
  const auto t_start = Clock::now();
  Shared sh;
  const Grid g = fine_grid(sh.spec);
  sh.penalized = solve_penalized(sh.spec, g, pen(1e-6));
  sh.projected = solve_projected(sh.spec, g);
  sh.pen_bp = extract_boundaries(sh.penalized);
  sh.proj_bp = extract_boundaries(sh.projected);

  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"structural invariants of v", [&] { return criterion1(sh); }},
      {"cross-scheme agreement", [&] { return criterion2(sh); }},
      {"boundary structure", [&] { return criterion3(sh); }},
      {"auxiliary representation of vx", [&] { return criterion4(sh); }},
      {"Skorokhod map", [&] { return criterion5(sh); }},
      {"saddle verification", [&] { return criterion6(sh); }},
      {"degenerate oracles", [] { return criterion7(); }},
      {"trajectory convexity", [] { return criterion8(); }},
      {"determinism", [&] { return criterion9(sh); }},
  };
  bool all = true;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    const auto t0 = Clock::now();
    Outcome o;
    try {
      o = criteria[k].second();
    } catch (const std::exception& e) {
      o.check(false, std::string("threw: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
    std::printf("criterion %zu %s: %s (%.1f s)\n", k + 1, o.passed ? "PASS" : "FAIL", criteria[k].first.c_str(), secs);
    for (const auto& d : o.details) std::printf("    %s\n", d.c_str());
    std::fflush(stdout);
    all = all && o.passed;
  }
  std::printf("acceptance: %s in %.1f s\n", all ? "all criteria pass" : "some criteria fail",
              std::chrono::duration<double>(Clock::now() - t_start).count());
  return all ? 0 : 1;
}
