#include "scgame/sde.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "scgame/errors.hpp"

namespace scg {

namespace {

std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::vector<double> time_axis(double t0, double dt, std::size_t n) {
  std::vector<double> t(n + 1);
  for (std::size_t k = 0; k <= n; ++k) t[k] = t0 + static_cast<double>(k) * dt;
  return t;
}

template <class Drift>
Path euler(const GameSpec& spec, double t0, double x0, double dt, std::span<const double> dW, Drift&& drift) {
  spec.check_state(x0);
  const std::size_t n = dW.size();
  Path p;
  p.times = time_axis(t0, dt, n);
  p.x.resize(n + 1);
  p.x[0] = x0;
  const bool half = spec.domain == Domain::HalfLine;
  if (half && x0 <= 0.0) p.exit_index = 0;
  for (std::size_t k = 1; k <= n; ++k) {
    const double x = p.x[k - 1];
    if (p.exit_index) {
      p.x[k] = x;
      continue;
    }
    double y = x + drift(x) * dt + spec.sigma(x) * dW[k - 1];
    if (half && y <= 0.0) {
      if (y < 0.0) ++p.clamp_events;
      y = 0.0;
      p.exit_index = k;
    }
    p.x[k] = y;
  }
  return p;
}

}  // namespace

std::uint64_t path_seed(std::uint64_t master, std::uint64_t index) {
  return splitmix64(master ^ splitmix64(index));
}

std::vector<double> brownian_increments(std::size_t n, double dt, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, std::sqrt(dt));
  std::vector<double> dW(n);
  for (double& d : dW) d = normal(rng);
  return dW;
}

Path simulate_uncontrolled(const GameSpec& spec, double t0, double x0, double dt, std::span<const double> dW) {
  return euler(spec, t0, x0, dt, dW, [&](double x) { return spec.mu(0.0, x); });
}

Path simulate_uncontrolled(const GameSpec& spec, double t0, double x0, const PathConfig& cfg) {
  if (cfg.n_steps == 0) throw ConfigError("n_steps must be at least 1");
  const double dt = (spec.T - t0) / static_cast<double>(cfg.n_steps);
  const auto dW = brownian_increments(cfg.n_steps, dt, cfg.seed);
  return simulate_uncontrolled(spec, t0, x0, dt, dW);
}

Path simulate_Y(const GameSpec& spec, double t0, double y0, double dt, std::span<const double> dW) {
  return euler(spec, t0, y0, dt, dW, [&](double y) { return spec.mu(0.0, y) + spec.sigma(y) * spec.sigma_x(y); });
}

Path simulate_Y(const GameSpec& spec, double t0, double y0, const PathConfig& cfg) {
  if (cfg.n_steps == 0) throw ConfigError("n_steps must be at least 1");
  const double dt = (spec.T - t0) / static_cast<double>(cfg.n_steps);
  const auto dW = brownian_increments(cfg.n_steps, dt, cfg.seed);
  return simulate_Y(spec, t0, y0, dt, dW);
}

StepCurve::StepCurve(std::vector<double> times, std::vector<double> values, Side side)
    : times_(std::move(times)), values_(std::move(values)), side_(side) {
  if (times_.size() != values_.size() || times_.empty()) throw GridMismatch("StepCurve: times and values differ in length");
}

StepCurve StepCurve::constant(double c) { return StepCurve({0.0}, {c}, Side::Left); }

double StepCurve::operator()(double s) const {
  // Tolerate rounding in s so that simulation times landing on a node pick it.
  const double tol = 1e-12 * (1.0 + std::abs(s));
  if (side_ == Side::Left) {
    const auto it = std::lower_bound(times_.begin(), times_.end(), s - tol);
    if (it == times_.end()) return values_.back();
    return values_[static_cast<std::size_t>(it - times_.begin())];
  }
  const auto it = std::upper_bound(times_.begin(), times_.end(), s + tol);
  if (it == times_.begin()) return values_.front();
  return values_[static_cast<std::size_t>(it - times_.begin()) - 1];
}

StepCurve StepCurve::shifted(double delta) const {
  StepCurve c = *this;
  for (double& v : c.values_) v += delta;
  return c;
}

namespace {

struct Recursion {
  const StepCurve& f;
  double t0, x0, dt;
  double lo_domain;
  bool half;

  double boundary(std::size_t k) const {
    const double b = f(t0 + static_cast<double>(k) * dt);
    if (b < lo_domain) throw BoundaryBelowDomain("reflection boundary lies below the state space");
    return b;
  }

  // Running-maximum map; increments[k-1] may depend on the reflected state via
  // `inc`, which receives (k, X_{k-1}).
  template <class Inc>
  ReflectedPath run(std::size_t n, Inc&& inc) const {
    ReflectedPath p;
    p.times = time_axis(t0, dt, n);
    p.x.resize(n + 1);
    p.nu.resize(n + 1);
    p.driver_cumsum.resize(n + 1);
    double M = std::max(x0 - boundary(0), 0.0);
    p.nu[0] = 0.0 - M;  // +0 rather than -0 in output files
    p.x[0] = x0 - M;
    p.driver_cumsum[0] = 0.0;
    if (half && p.x[0] <= 0.0) p.exit_index = 0;
    for (std::size_t k = 1; k <= n; ++k) {
      if (p.exit_index) {
        p.x[k] = p.x[k - 1];
        p.nu[k] = p.nu[k - 1];
        p.driver_cumsum[k] = p.driver_cumsum[k - 1];
        continue;
      }
      const double C = p.driver_cumsum[k - 1] + inc(k, p.x[k - 1]);
      M = std::max(M, std::max(x0 + C - boundary(k), 0.0));
      p.driver_cumsum[k] = C;
      p.nu[k] = 0.0 - M;
      double x = x0 + C - M;
      if (half && x <= 0.0) {
        x = 0.0;
        p.exit_index = k;
      }
      p.x[k] = x;
    }
    return p;
  }
};

}  // namespace

ReflectedPath skorokhod_reflect(const GameSpec& spec, std::span<const double> dW, const StepCurve& f, double t0,
                                double x0, double dt, const ReflectionOptions& opts) {
  spec.check_state(x0);
  const Recursion rec{f, t0, x0, dt, spec.inf_domain(), spec.domain == Domain::HalfLine};
  const auto step = [&](std::size_t k, double x) { return spec.mu(0.0, x) * dt + spec.sigma(x) * dW[k - 1]; };
  ReflectedPath p = rec.run(dW.size(), step);
  if (opts.mode == ReflectionMode::OnePass) return p;

  // Picard: freeze the coefficients along the previous iterate.
  std::vector<double> prev(dW.size() + 1, x0);
  for (std::size_t it = 0; it < opts.picard_max; ++it) {
    ReflectedPath q = rec.run(dW.size(), [&](std::size_t k, double) { return step(k, prev[k - 1]); });
    double change = 0.0;
    for (std::size_t k = 0; k < q.x.size(); ++k) change = std::max(change, std::abs(q.x[k] - prev[k]));
    prev = q.x;
    if (change < opts.picard_tol) return q;
  }
  throw FixedPointStall(0, 0.0);
}

ReflectedPath skorokhod_reflect_driver(std::span<const double> increments, const StepCurve& f, double t0, double x0,
                                       double dt) {
  const Recursion rec{f, t0, x0, dt, -kInf, false};
  return rec.run(increments.size(), [&](std::size_t k, double) { return increments[k - 1]; });
}

Path simulate_controlled(const GameSpec& spec, std::span<const double> dW, std::span<const double> nu, double t0,
                         double x0, double dt) {
  spec.check_state(x0);
  if (nu.size() != dW.size() + 1) throw GridMismatch("simulate_controlled: control length must be n_steps + 1");
  const std::size_t n = dW.size();
  Path p;
  p.times = time_axis(t0, dt, n);
  p.x.resize(n + 1);
  const bool half = spec.domain == Domain::HalfLine;
  double C = 0.0;
  p.x[0] = x0 + nu[0];
  if (half && p.x[0] <= 0.0) {
    p.x[0] = 0.0;
    p.exit_index = 0;
  }
  for (std::size_t k = 1; k <= n; ++k) {
    if (p.exit_index) {
      p.x[k] = p.x[k - 1];
      continue;
    }
    const double x = p.x[k - 1];
    C += spec.mu(0.0, x) * dt + spec.sigma(x) * dW[k - 1];
    double y = x0 + C + nu[k];
    if (half && y <= 0.0) {
      if (y < 0.0) ++p.clamp_events;
      y = 0.0;
      p.exit_index = k;
    }
    p.x[k] = y;
  }
  return p;
}

std::optional<std::size_t> first_hitting(std::span<const double> values, std::span<const double> curve,
                                         HitSide side) {
  const std::size_t n = std::min(values.size(), curve.size());
  for (std::size_t k = 0; k < n; ++k) {
    const bool hit = side == HitSide::BelowOrEqual ? values[k] <= curve[k] : values[k] >= curve[k];
    if (hit) return k;
  }
  return std::nullopt;
}

}  // namespace scg
