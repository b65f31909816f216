#include <doctest.h>

#include <cmath>
#include <cstring>

#include "scgame/boundaries.hpp"
#include "scgame/errors.hpp"
#include "scgame/game_sim.hpp"
#include "scgame/grid.hpp"
#include "scgame/vi_solver.hpp"

using namespace scg;

namespace {

GameSpec constants_spec() {
  GameSpec s;
  s.mu = ScalarFn::parse("0.05 * x");
  s.sigma1 = 0.4;
  s.g = ScalarFn::constant(2.0);
  s.h = ScalarFn::constant(1.0);
  s.r = 0.1;
  s.alpha0 = 2.0;
  s.validate();
  return s;
}

struct Solved {
  GameSpec spec = benchmark_spec(1, 1, 0.05, 0.4, {0.1, 2.0, 1.0});
  ValueSurface surface;
  BoundaryPair bp;
};

const Solved& small_benchmark() {
  static const Solved s = [] {
    Solved out;
    PenalizationParams p;
    p.eps = p.delta = 1e-6;
    out.surface = solve_penalized(out.spec, build_grid(out.spec, {51, 201, 0.0, 4.0}), p);
    out.bp = extract_boundaries(out.surface);
    return out;
  }();
  return s;
}

}  // namespace

TEST_SUITE("game_sim") {
  TEST_CASE("payoff on a hand-worked path") {
    const auto spec = constants_spec();
    const std::vector<double> x{1.0, 1.0, 1.0}, nu{-0.5, -0.5, -1.0};
    const double e1 = std::exp(-0.05), e2 = std::exp(-0.1);
    const double running = 0.25 * (1.0 + 2.0 * e1 + e2);
    CHECK(payoff(spec, 0.0, 0.5, x, {}, 2) == doctest::Approx(running + 2.0 * e2));
    CHECK(payoff(spec, 0.0, 0.5, x, nu, 2) == doctest::Approx(running + 2.0 * e2 + 2.0 * (0.5 + 0.5 * e2)));
    CHECK(payoff(spec, 0.0, 0.5, x, nu, 0) == doctest::Approx(2.0 + 2.0 * 0.5));
    CHECK(payoff(spec, 0.0, 0.5, x, {}, 7) == payoff(spec, 0.0, 0.5, x, {}, 2));
  }

  TEST_CASE("exit ends accrual") {
    const auto spec = constants_spec();
    const std::vector<double> x{1.0, 0.0, 0.0};
    CHECK(payoff(spec, 0.0, 0.5, x, {}, 2, 1) == payoff(spec, 0.0, 0.5, x, {}, 1));
  }

  TEST_CASE("stopping at once without control pays g with zero error") {
    const auto& s = small_benchmark();
    const StrategyPair now{"stop now", {StopRule::Kind::FixedTime, 0.0, 0.0}, {ControlRule::Kind::NoControl}};
    const auto e = estimate_value(s.spec, curves_from(s.bp), now, 0.0, 1.0, {500, 20, 1, false});
    CHECK(e.mean == 0.0);
    CHECK(e.se == 0.0);
    CHECK(e.n == 500);
  }

  TEST_CASE("serial and parallel samples are bitwise identical") {
    const auto& s = small_benchmark();
    const std::vector<StrategyPair> pairs{
        {},
        {"no control", {}, {ControlRule::Kind::NoControl}},
        {"fixed", {StopRule::Kind::FixedTime, 0.5, 0.0}, {ControlRule::Kind::ReflectAtConstant, 0.0, 1.5}}};
    for (bool anti : {false, true}) {
      const SimConfig cfg{3000, 50, 99, anti};
      const auto par = payoff_samples(s.spec, curves_from(s.bp), pairs, 0.0, 1.0, cfg);
      const auto ser = payoff_samples_serial(s.spec, curves_from(s.bp), pairs, 0.0, 1.0, cfg);
      for (std::size_t j = 0; j < pairs.size(); ++j)
        CHECK(std::memcmp(par[j].data(), ser[j].data(), par[j].size() * sizeof(double)) == 0);
    }
  }

  TEST_CASE("antithetic sampling averages mirrored drivers") {
    const auto& s = small_benchmark();
    const StrategyPair eq;
    const auto anti = estimate_value(s.spec, curves_from(s.bp), eq, 0.0, 1.0, {4000, 50, 5, true});
    const auto plain = estimate_value(s.spec, curves_from(s.bp), eq, 0.0, 1.0, {4000, 50, 5, false});
    CHECK(std::abs(anti.mean - plain.mean) <= 4.0 * std::hypot(anti.se, plain.se));
    CHECK(anti.se < plain.se);
  }

  TEST_CASE("deviation suite requires a usable action boundary") {
    const auto& s = small_benchmark();
    SuiteConfig cfg;
    cfg.sim = {200, 50, 1, false};
    CHECK_THROWS_AS(deviation_suite(s.spec, s.surface, s.bp, 0.013, 1.0, cfg), PreconditionFailure);
    CHECK_THROWS_AS(deviation_suite(s.spec, s.surface, s.bp, 1.0, 1.0, cfg), PreconditionFailure);
    BoundaryPair broken = s.bp;
    broken.b[0] = kInf;
    broken.b_at_window_edge[0] = 1;
    CHECK_THROWS_AS(deviation_suite(s.spec, s.surface, broken, 0.0, 1.0, cfg), PreconditionFailure);
  }

  TEST_CASE("deviation suite menu and report") {
    const auto& s = small_benchmark();
    SuiteConfig cfg;
    cfg.sim = {4000, 50, 3, false};
    const auto rep = deviation_suite(s.spec, s.surface, s.bp, 0.0, 1.0, cfg);
    CHECK(rep.deviations.size() == 5 + 2 + 1 + 2 + 2);
    CHECK(rep.v_pde == doctest::Approx(s.surface.interpolate(0.0, 1.0)));
    for (const auto& d : rep.deviations) {
      CHECK((d.player == "stopper" || d.player == "controller"));
      CHECK(d.margin == doctest::Approx(3.0 * d.diff_se + rep.allowance));
    }
    CHECK(rep.strict_stopper());
    CHECK(rep.strict_controller());
  }

  TEST_CASE("pairwise summation and summaries") {
    std::vector<double> xs(1000);
    for (std::size_t i = 0; i < xs.size(); ++i) xs[i] = 0.1 * static_cast<double>(i % 7);
    double naive = 0.0;
    for (double x : xs) naive += x;
    CHECK(pairwise_sum(xs) == doctest::Approx(naive));
    const std::vector<double> two{1.0, 3.0};
    const auto e = summarize(two);
    CHECK(e.mean == 2.0);
    CHECK(e.se == doctest::Approx(1.0));
    CHECK(summarize(std::vector<double>{}).n == 0);
  }

  TEST_CASE("allowance fit is a slope through the origin") {
    const std::vector<double> err{0.1, 0.2, 0.4}, scale{1.0, 2.0, 4.0};
    CHECK(fit_allowance(err, scale) == doctest::Approx(0.1));
    const std::vector<double> noisy{0.1, 0.3}, sc{1.0, 1.0};
    CHECK(fit_allowance(noisy, sc) == doctest::Approx(0.2));
  }
}
