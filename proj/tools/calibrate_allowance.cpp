// Fits the Monte Carlo allowance constant c in |J - v| <= 3 se + c (sqrt(dt) + dx)
// from the equilibrium estimate at three resolutions. Uses its own seed so that
// the fitted constant is not tuned on the verification draws.

#include <cmath>
#include <cstdio>
#include <vector>

#include <CLI11.hpp>

#include "scgame/boundaries.hpp"
#include "scgame/game_sim.hpp"
#include "scgame/grid.hpp"
#include "scgame/vi_solver.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Calibrate the Monte Carlo allowance constant on the benchmark"};
  std::size_t paths = 100000;
  std::uint64_t seed = 777;
  double t0 = 0.0, x0 = 1.0;
  app.add_option("--paths", paths, "paths per resolution");
  app.add_option("--seed", seed, "master seed (keep distinct from verification seeds)");
  app.add_option("--t0", t0);
  app.add_option("--x0", x0);
  CLI11_PARSE(app, argc, argv);

  const auto spec = scg::benchmark_spec(1, 1, 0.05, 0.4, {0.1, 2.0, 1.0});
  std::vector<double> errors, scales;
  for (std::size_t k : {1, 2, 4}) {
    const scg::Grid grid = scg::build_grid(spec, {50 * k + 1, 200 * k + 1, 0.0, 4.0});
    scg::PenalizationParams p;
    p.eps = p.delta = 1e-6;
    const auto surface = scg::solve_penalized(spec, grid, p);
    const auto curves = scg::curves_from(scg::extract_boundaries(surface));
    const scg::SimConfig cfg{paths, 50 * k, seed, false};
    const auto e = scg::estimate_value(spec, curves, scg::StrategyPair{}, t0, x0, cfg);
    const double v = surface.interpolate(t0, x0);
    const double scale = std::sqrt((spec.T - t0) / static_cast<double>(cfg.n_steps)) + grid.dx;
    errors.push_back(std::abs(e.mean - v));
    scales.push_back(scale);
    std::printf("grid %zux%zu steps %zu  v %.6f  J %.6f  se %.2e  |J-v| %.2e  scale %.4f\n", grid.n_t(), grid.n_x(),
                cfg.n_steps, v, e.mean, e.se, errors.back(), scale);
  }
  std::printf("c = %.6g\n", scg::fit_allowance(errors, scales));
  return 0;
}
