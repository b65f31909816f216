#include <doctest.h>

#include <cmath>

#include "scgame/errors.hpp"
#include "scgame/model.hpp"

using namespace scg;

namespace {

GameSpec custom(const std::string& h, const std::string& g = "0", double r = 0.0,
                const std::string& mu = "0.05 * x", Domain d = Domain::HalfLine) {
  GameSpec s;
  s.domain = d;
  s.mu = ScalarFn::parse(mu);
  s.g = ScalarFn::parse(g);
  s.h = ScalarFn::parse(h);
  if (d == Domain::HalfLine) {
    s.sigma1 = 0.4;
  } else {
    s.sigma0 = 0.4;
  }
  s.r = r;
  s.validate();
  return s;
}

}  // namespace

TEST_SUITE("model") {
  TEST_CASE("theta on the benchmark") {
    const auto s = benchmark_spec(1, 1, 0.05, 0.4);
    for (double t : {0.0, 0.3, 1.0}) CHECK(theta(s, t, 1.0) == doctest::Approx(0.0));
    CHECK(theta(s, 0.0, 0.0) == doctest::Approx(-1.0));
    CHECK_THROWS_AS(theta(s, 0.0, -0.5), DomainError);
  }

  TEST_CASE("theta uses the time derivative of g") {
    const auto s = custom("0", "exp(-t)");
    for (double t : {0.0, 0.5, 1.0}) CHECK(theta(s, t, 2.0) == doctest::Approx(-std::exp(-t)));
  }

  TEST_CASE("theta_lower examples") {
    const Bracket br{0.0, 10.0};
    const auto bench = benchmark_spec(1, 1, 0.05, 0.4);
    CHECK(theta_lower(bench, 0.0, br) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(theta_lower(bench, 0.7, br) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(std::isinf(theta_lower(custom("-1"), 0.2, br)));
    CHECK(theta_lower(custom("x - t"), 0.4, br) == doctest::Approx(0.4).epsilon(1e-9));
    CHECK(theta_lower(benchmark_spec(2, 0.5, 0.05, 0.4), 0.0, br) == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(theta_lower(custom("x + 1"), 0.0, br) == 0.0);
  }

  TEST_CASE("theta_lower rejects non-monotone theta") {
    CHECK_THROWS_AS(theta_lower(custom("-(x - 2)^2 + 1"), 0.0, {0.0, 4.0}), AssumptionViolation);
  }

  TEST_CASE("validate_assumptions verdicts") {
    CHECK(validate_assumptions(benchmark_spec(1, 1, 0.05, 0.4), {}).all_passed());
    CHECK(validate_assumptions(benchmark_spec(1, 1, 0.0, 0.4), {}).all_passed());

    const auto bad_h = validate_assumptions(custom("-x"), {});
    const auto* c = bad_h.find("h_x_nonnegative");
    REQUIRE(c != nullptr);
    CHECK_FALSE(c->passed);
    CHECK_FALSE(c->witnesses.empty());

    GameSpec concave = custom("x^2 - 1", "0", 0.1, "-x^2", Domain::RealLine);
    const auto rep = validate_assumptions(concave, {64, 256, -3.0, 3.0});
    const auto* cv = rep.find("mu_convex");
    REQUIRE(cv != nullptr);
    CHECK_FALSE(cv->passed);
    CHECK_FALSE(cv->witnesses.empty());
  }

  TEST_CASE("failed clauses always carry a witness") {
    for (const char* h : {"-x", "x^2 - 1 + t*x", "-1", "x - 1"}) {
      const auto rep = validate_assumptions(custom(h), {16, 64, 0.0, 4.0});
      for (const auto& c : rep.clauses) {
        if (!c.passed) CHECK_MESSAGE(!c.witnesses.empty(), c.id);
      }
    }
  }

  TEST_CASE("family constructors validate their parameters") {
    CHECK_THROWS_AS(benchmark_spec(0, 1, 0.05, 0.4), ConfigError);
    CHECK_THROWS_AS(benchmark_spec(1, -1, 0.05, 0.4), ConfigError);
    CHECK_THROWS_AS(benchmark_spec(1, 1, 0.05, 0.0), ConfigError);
    GameSpec s = benchmark_spec(1, 1, 0.05, 0.4);
    s.alpha0 = 0.0;
    CHECK_THROWS_AS(s.validate(), ConfigError);
    s = benchmark_spec(1, 1, 0.05, 0.4);
    s.mu = ScalarFn::parse("x + 1");
    CHECK_THROWS_AS(s.validate(), ConfigError);
    CHECK(validate_assumptions(real_line_spec(0.1, 0.2, 0.5, 1.0, 1.0, 0.3, 0.0), {64, 256, -4.0, 4.0}).all_passed());
    CHECK(validate_assumptions(power_drift_spec(2.0, 3.0, 0.5, 1.0, 1.0, 0.4), {}).all_passed());
  }

  TEST_CASE("lambda") {
    CHECK(lambda_fn(benchmark_spec(1, 1, 0.05, 0.4, {0.02, 1.0, 1.0}), 1.3) == doctest::Approx(-0.03));
    CHECK(lambda_fn(benchmark_spec(1, 1, 0.0, 0.4, {0.1, 1.0, 1.0}), 2.0) == doctest::Approx(0.1));
    const auto p = power_drift_spec(2.0, 3.0, 0.5, 1.0, 1.0, 0.4, {0.1, 1.0, 1.0});
    CHECK(lambda_fn(p, 4.0) == doctest::Approx(0.1 - 2.0 * std::pow(2.5, 1.0)));
  }

  TEST_CASE("theta_lower is non-decreasing in t and splits the sign of theta") {
    const auto s = custom("x^2 - 1 + 0.5 * (1 - t)", "0", 0.0);
    REQUIRE(validate_assumptions(s, {}).find("theta_nonincreasing_in_t")->passed);
    double prev = -1.0;
    for (int j = 0; j <= 20; ++j) {
      const double t = j / 20.0;
      const double tl = theta_lower(s, t, {0.0, 5.0});
      CHECK(tl >= prev - 1e-10);
      prev = tl;
      for (int i = 0; i <= 50; ++i) {
        const double x = 5.0 * i / 50.0;
        if (std::abs(x - tl) < 1e-9) continue;
        CHECK((theta(s, t, x) > 0.0) == (x > tl));
      }
    }
  }

  TEST_CASE("ScalarFn derivatives agree with finite differences") {
    const std::vector<ScalarFn> fns{benchmark_spec(1.3, 0.7, 0.05, 0.4).h, benchmark_spec(1, 1, 0.05, 0.4).mu,
                                    power_drift_spec(2.5, 3.0, 0.5, 1.0, 1.0, 0.4).mu,
                                    real_line_spec(0.1, 0.2, 0.5, 1.0, 1.0, 0.3, -0.1).g,
                                    ScalarFn::parse("exp(-t) * x^3 + sqrt(1 + x^2)")};
    for (const auto& f : fns) {
      for (double x : {0.7, 1.1, 2.3, 3.9}) {
        for (double t : {0.1, 0.6}) {
          const double h = 1e-5 * (1.0 + std::abs(x));
          const double fdx = (f(t, x + h) - f(t, x - h)) / (2.0 * h);
          const double fdt = (f(t + h, x) - f(t - h, x)) / (2.0 * h);
          CHECK(std::abs(f.dx(t, x) - fdx) <= 1e-6 * (1.0 + std::abs(fdx)));
          CHECK(std::abs(f.dt(t, x) - fdt) <= 1e-6 * (1.0 + std::abs(fdt)));
        }
      }
    }
  }
}
