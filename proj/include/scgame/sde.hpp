#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "scgame/model.hpp"

namespace scg {

/// Per-path stream seed: splitmix64(master ^ splitmix64(index)).
std::uint64_t path_seed(std::uint64_t master, std::uint64_t index);

/// n Brownian increments of variance dt from std::mt19937_64 seeded with
/// `seed`, drawn with std::normal_distribution.
std::vector<double> brownian_increments(std::size_t n, double dt, std::uint64_t seed);

struct PathConfig {
  std::size_t n_steps = 1000;
  std::uint64_t seed = 1;
};

struct Path {
  std::vector<double> times;
  std::vector<double> x;
  std::optional<std::size_t> exit_index;  ///< first step at or below 0 on the half line
  std::size_t clamp_events = 0;
};

/// Euler-Maruyama for dX = mu(X) ds + sigma(X) dW on [t0, T]. On the half line
/// a step landing at or below 0 is clamped there and the path stays absorbed.
Path simulate_uncontrolled(const GameSpec& spec, double t0, double x0, const PathConfig& cfg);
Path simulate_uncontrolled(const GameSpec& spec, double t0, double x0, double dt, std::span<const double> dW);

/// Same scheme for dY = (mu(Y) + sigma(Y) sigma_x(Y)) ds + sigma(Y) dW.
Path simulate_Y(const GameSpec& spec, double t0, double y0, const PathConfig& cfg);
Path simulate_Y(const GameSpec& spec, double t0, double y0, double dt, std::span<const double> dW);

/// Piecewise-constant extension of a curve sampled at ascending times.
/// Left-continuous: f(s) = f(t_k) on (t_{k-1}, t_k]. Right-continuous:
/// f(s) = f(t_k) on [t_k, t_{k+1}). Outside the sampled range the end values
/// are held.
class StepCurve {
 public:
  enum class Side { Left, Right };

  StepCurve() = default;
  StepCurve(std::vector<double> times, std::vector<double> values, Side side);
  static StepCurve constant(double c);

  double operator()(double s) const;
  StepCurve shifted(double delta) const;

 private:
  std::vector<double> times_;
  std::vector<double> values_;
  Side side_ = Side::Left;
};

struct ReflectedPath {
  std::vector<double> times;
  std::vector<double> x;
  std::vector<double> nu;             ///< non-increasing, nu[0] = -(x0 - f(t0))^+
  std::vector<double> driver_cumsum;  ///< accumulated drift and noise, 0 at t0
  std::optional<std::size_t> exit_index;
};

enum class ReflectionMode { OnePass, Picard };

struct ReflectionOptions {
  ReflectionMode mode = ReflectionMode::OnePass;
  double picard_tol = 1e-13;
  std::size_t picard_max = 10000;
};

/// Discrete Skorokhod map below the boundary f. The step-k increment uses the
/// reflected state X_{k-1}; M_k = max(M_{k-1}, (x0 + C_k - f(t_k))^+),
/// nu_k = -M_k, X_k = x0 + C_k + nu_k. Picard mode recomputes all increments
/// from the previous iterate until the sup-norm change drops below picard_tol.
/// Throws BoundaryBelowDomain if f(t_k) < inf O.
ReflectedPath skorokhod_reflect(const GameSpec& spec, std::span<const double> dW, const StepCurve& f,
                                double t0, double x0, double dt, const ReflectionOptions& opts = {});

/// Same map with the state-independent driver increments given directly
/// (no coefficients involved).
ReflectedPath skorokhod_reflect_driver(std::span<const double> increments, const StepCurve& f, double t0,
                                       double x0, double dt);

/// X_k = x0 + C_k + nu_k with a prescribed control nu (nu[0] may be a jump),
/// increments using X_{k-1}. Absorbed at 0 on the half line.
Path simulate_controlled(const GameSpec& spec, std::span<const double> dW, std::span<const double> nu,
                         double t0, double x0, double dt);

enum class HitSide { BelowOrEqual, AtOrAbove };

/// Smallest k with values[k] <= curve[k] (or >=); nullopt if never.
std::optional<std::size_t> first_hitting(std::span<const double> values, std::span<const double> curve,
                                         HitSide side);

}  // namespace scg
