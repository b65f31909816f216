#include "scgame/game_sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>

#include "scgame/errors.hpp"

namespace scg {

GameCurves curves_from(const BoundaryPair& pair) {
  return {StepCurve(pair.t_nodes, pair.a, StepCurve::Side::Right), StepCurve(pair.t_nodes, pair.b, StepCurve::Side::Left)};
}

double payoff(const GameSpec& spec, double t0, double dt, std::span<const double> x, std::span<const double> nu,
              std::size_t stop_index, std::optional<std::size_t> exit_index) {
  std::size_t K = std::min(stop_index, x.size() - 1);
  if (exit_index) K = std::min(K, *exit_index);
  const auto disc = [&](std::size_t k) { return std::exp(-spec.r * static_cast<double>(k) * dt); };
  const auto time = [&](std::size_t k) { return t0 + static_cast<double>(k) * dt; };

  double running = 0.0;
  double prev = K > 0 ? disc(0) * spec.h(time(0), x[0]) : 0.0;
  for (std::size_t k = 1; k <= K; ++k) {
    const double cur = disc(k) * spec.h(time(k), x[k]);
    running += 0.5 * dt * (prev + cur);
    prev = cur;
  }
  double control = 0.0;
  if (!nu.empty()) {
    double last = 0.0;
    for (std::size_t k = 0; k <= K; ++k) {
      control += disc(k) * std::abs(nu[k] - last);
      last = nu[k];
    }
  }
  return disc(K) * spec.g(time(K), 0.0) + running + spec.alpha0 * control;
}

double pairwise_sum(std::span<const double> xs) {
  if (xs.size() <= 8) {
    double s = 0.0;
    for (double v : xs) s += v;
    return s;
  }
  const std::size_t half = xs.size() / 2;
  return pairwise_sum(xs.first(half)) + pairwise_sum(xs.subspan(half));
}

Estimate summarize(std::span<const double> samples) {
  Estimate e;
  e.n = samples.size();
  if (e.n == 0) return e;
  e.mean = pairwise_sum(samples) / static_cast<double>(e.n);
  if (e.n > 1) {
    std::vector<double> sq(e.n);
    for (std::size_t i = 0; i < e.n; ++i) sq[i] = (samples[i] - e.mean) * (samples[i] - e.mean);
    e.se = std::sqrt(pairwise_sum(sq) / static_cast<double>(e.n - 1) / static_cast<double>(e.n));
  }
  return e;
}

double play(const GameSpec& spec, const GameCurves& curves, const StrategyPair& pair, double t0, double x0, double dt,
            std::span<const double> dW) {
  const std::size_t n = dW.size();
  std::vector<double> x, nu;
  std::optional<std::size_t> exit;
  if (pair.control.kind == ControlRule::Kind::NoControl) {
    Path p = simulate_uncontrolled(spec, t0, x0, dt, dW);
    x = std::move(p.x);
    exit = p.exit_index;
  } else {
    StepCurve f;
    switch (pair.control.kind) {
      case ControlRule::Kind::ReflectAtB: f = curves.b; break;
      case ControlRule::Kind::ReflectAtShifted: f = curves.b.shifted(pair.control.shift); break;
      default: f = StepCurve::constant(pair.control.constant); break;
    }
    ReflectedPath p = skorokhod_reflect(spec, dW, f, t0, x0, dt);
    x = std::move(p.x);
    nu = std::move(p.nu);
    exit = p.exit_index;
  }

  std::size_t stop = n;
  if (pair.stop.kind == StopRule::Kind::FixedTime) {
    stop = std::min<std::size_t>(n, static_cast<std::size_t>(std::llround(std::max(pair.stop.s, 0.0) / dt)));
  } else {
    const double shift = pair.stop.kind == StopRule::Kind::ThresholdShift ? pair.stop.shift : 0.0;
    std::vector<double> level(n + 1);
    for (std::size_t k = 0; k <= n; ++k) level[k] = curves.a(t0 + static_cast<double>(k) * dt) + shift;
    if (auto hit = first_hitting(x, level, HitSide::BelowOrEqual)) stop = *hit;
  }
  return payoff(spec, t0, dt, x, nu, stop, exit);
}

namespace {

std::vector<std::vector<double>> samples_impl(const GameSpec& spec, const GameCurves& curves,
                                              std::span<const StrategyPair> pairs, double t0, double x0,
                                              const SimConfig& cfg, bool parallel) {
  if (cfg.n_steps == 0 || cfg.n_paths == 0) throw ConfigError("n_steps and n_paths must be positive");
  const double dt = (spec.T - t0) / static_cast<double>(cfg.n_steps);
  const std::size_t np = pairs.size();
  std::vector<std::vector<double>> out(np, std::vector<double>(cfg.n_paths));
  const auto body = [&](std::size_t i) {
    std::vector<double> dW = brownian_increments(cfg.n_steps, dt, path_seed(cfg.seed, i));
    for (std::size_t j = 0; j < np; ++j) out[j][i] = play(spec, curves, pairs[j], t0, x0, dt, dW);
    if (cfg.antithetic) {
      for (double& d : dW) d = -d;
      for (std::size_t j = 0; j < np; ++j) out[j][i] = 0.5 * (out[j][i] + play(spec, curves, pairs[j], t0, x0, dt, dW));
    }
  };
  const auto n = static_cast<std::ptrdiff_t>(cfg.n_paths);
  if (parallel) {
    // Exceptions may not cross the parallel region; the first one is rethrown.
    std::exception_ptr err;
#pragma omp parallel for schedule(dynamic, 64)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
      try {
        body(static_cast<std::size_t>(i));
      } catch (...) {
#pragma omp critical
        if (!err) err = std::current_exception();
      }
    }
    if (err) std::rethrow_exception(err);
  } else {
    for (std::ptrdiff_t i = 0; i < n; ++i) body(static_cast<std::size_t>(i));
  }
  return out;
}

}  // namespace

std::vector<std::vector<double>> payoff_samples(const GameSpec& spec, const GameCurves& curves,
                                                std::span<const StrategyPair> pairs, double t0, double x0,
                                                const SimConfig& cfg) {
  return samples_impl(spec, curves, pairs, t0, x0, cfg, true);
}

std::vector<std::vector<double>> payoff_samples_serial(const GameSpec& spec, const GameCurves& curves,
                                                       std::span<const StrategyPair> pairs, double t0, double x0,
                                                       const SimConfig& cfg) {
  return samples_impl(spec, curves, pairs, t0, x0, cfg, false);
}

Estimate estimate_value(const GameSpec& spec, const GameCurves& curves, const StrategyPair& pair, double t0,
                        double x0, const SimConfig& cfg) {
  return summarize(payoff_samples(spec, curves, std::span(&pair, 1), t0, x0, cfg)[0]);
}

Estimate estimate_value_serial(const GameSpec& spec, const GameCurves& curves, const StrategyPair& pair, double t0,
                               double x0, const SimConfig& cfg) {
  return summarize(payoff_samples_serial(spec, curves, std::span(&pair, 1), t0, x0, cfg)[0]);
}

bool SaddleReport::all_passed() const {
  return equilibrium_passed &&
         std::all_of(deviations.begin(), deviations.end(), [](const DeviationVerdict& d) { return d.passed; });
}

bool SaddleReport::strict_stopper() const {
  return std::any_of(deviations.begin(), deviations.end(),
                     [](const DeviationVerdict& d) { return d.player == "stopper" && d.strict; });
}

bool SaddleReport::strict_controller() const {
  return std::any_of(deviations.begin(), deviations.end(),
                     [](const DeviationVerdict& d) { return d.player == "controller" && d.strict; });
}

namespace {

std::string fmt(const char* pattern, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, pattern, v);
  return buf;
}

}  // namespace

SaddleReport deviation_suite(const GameSpec& spec, const ValueSurface& surface, const BoundaryPair& bp, double t0,
                             double x0, const SuiteConfig& cfg) {
  const Grid& grid = surface.grid;
  const auto n0 = static_cast<std::size_t>(std::llround(t0 / grid.dt));
  if (n0 >= bp.b.size() || std::abs(grid.t_nodes[n0] - t0) > 1e-12 * (1.0 + t0))
    throw PreconditionFailure("t0 must be a grid time");
  if (bp.b_at_window_edge[n0] || !std::isfinite(bp.b[n0]))
    throw PreconditionFailure("action boundary at t0 lies at the window edge; the equilibrium control is undefined");
  if (!(bp.b[n0] > spec.inf_domain()))
    throw PreconditionFailure("action boundary at t0 does not lie above inf O");

  const GameCurves curves = curves_from(bp);
  using SK = StopRule::Kind;
  using CK = ControlRule::Kind;
  std::vector<StrategyPair> menu;
  menu.push_back({"equilibrium", {SK::HitBoundaryA}, {CK::ReflectAtB}});
  std::vector<std::string> player{"-"};
  const double horizon = spec.T - t0;
  for (double f : cfg.fixed_times) {
    menu.push_back({"stop at fixed time " + fmt("%.6g", f * horizon), {SK::FixedTime, f * horizon}, {CK::ReflectAtB}});
    player.push_back("stopper");
  }
  for (double s : {cfg.shift, -cfg.shift}) {
    menu.push_back({"stop at a" + fmt("%+.6g", s), {SK::ThresholdShift, 0.0, s}, {CK::ReflectAtB}});
    player.push_back("stopper");
  }
  menu.push_back({"no control", {SK::HitBoundaryA}, {CK::NoControl}});
  player.push_back("controller");
  for (double s : {cfg.shift, -cfg.shift}) {
    menu.push_back({"reflect at b" + fmt("%+.6g", s), {SK::HitBoundaryA}, {CK::ReflectAtShifted, s}});
    player.push_back("controller");
  }
  for (double c : cfg.constants) {
    menu.push_back({"reflect at constant " + fmt("%.6g", c), {SK::HitBoundaryA}, {CK::ReflectAtConstant, 0.0, c}});
    player.push_back("controller");
  }

  const auto samples = payoff_samples(spec, curves, menu, t0, x0, cfg.sim);
  const double dt = horizon / static_cast<double>(cfg.sim.n_steps);

  SaddleReport rep;
  rep.header =
      "Saddle inequalities are checked against the finite deviation menu below only; they are not verified over all "
      "admissible strategies.";
  rep.t0 = t0;
  rep.x0 = x0;
  rep.v_pde = surface.interpolate(t0, x0);
  rep.equilibrium = summarize(samples[0]);
  rep.allowance = cfg.allowance_c * (std::sqrt(dt) + grid.dx);
  rep.equilibrium_margin = 3.0 * rep.equilibrium.se + rep.allowance;
  rep.equilibrium_passed = std::abs(rep.equilibrium.mean - rep.v_pde) <= rep.equilibrium_margin;

  std::vector<double> diff(cfg.sim.n_paths);
  for (std::size_t j = 1; j < menu.size(); ++j) {
    DeviationVerdict d;
    d.name = menu[j].name;
    d.player = player[j];
    d.estimate = summarize(samples[j]);
    for (std::size_t i = 0; i < diff.size(); ++i) diff[i] = samples[j][i] - samples[0][i];
    const Estimate de = summarize(diff);
    d.diff = de.mean;
    d.diff_se = de.se;
    d.margin = 3.0 * de.se + rep.allowance;
    if (d.player == "stopper") {
      d.direction = "J(dev) <= J(eq) + margin";
      d.passed = d.diff <= d.margin;
      d.strict = -d.diff > 5.0 * de.se;
    } else {
      d.direction = "J(dev) >= J(eq) - margin";
      d.passed = d.diff >= -d.margin;
      d.strict = d.diff > 5.0 * de.se;
    }
    rep.deviations.push_back(std::move(d));
  }
  return rep;
}

double fit_allowance(std::span<const double> abs_errors, std::span<const double> scales) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < std::min(abs_errors.size(), scales.size()); ++i) {
    num += abs_errors[i] * scales[i];
    den += scales[i] * scales[i];
  }
  return den > 0.0 ? num / den : 0.0;
}

}  // namespace scg
