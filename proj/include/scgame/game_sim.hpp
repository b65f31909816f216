#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "scgame/boundaries.hpp"
#include "scgame/model.hpp"
#include "scgame/sde.hpp"
#include "scgame/vi_solver.hpp"

namespace scg {

struct StopRule {
  enum class Kind { HitBoundaryA, FixedTime, ThresholdShift };
  Kind kind = Kind::HitBoundaryA;
  double s = 0.0;      ///< FixedTime: elapsed time since t0
  double shift = 0.0;  ///< ThresholdShift: stop on X <= a + shift
};

struct ControlRule {
  enum class Kind { ReflectAtB, NoControl, ReflectAtShifted, ReflectAtConstant };
  Kind kind = Kind::ReflectAtB;
  double shift = 0.0;     ///< ReflectAtShifted: boundary b + shift
  double constant = 0.0;  ///< ReflectAtConstant
};

struct StrategyPair {
  std::string name = "equilibrium";
  StopRule stop;
  ControlRule control;
};

/// Equilibrium curves as step functions: a right-continuous, b left-continuous.
struct GameCurves {
  StepCurve a;
  StepCurve b;
};

GameCurves curves_from(const BoundaryPair& pair);

/// e^{-r s_K} g(t0 + s_K) + trapezoid of e^{-rs} h(t0+s, X_s) over [0, s_K]
/// + sum_{k<=K} e^{-r s_k} alpha0 |nu_k - nu_{k-1}| with nu_{-1} = 0, where
/// K = min(stop_index, exit_index). An empty nu means no control.
double payoff(const GameSpec& spec, double t0, double dt, std::span<const double> x, std::span<const double> nu,
              std::size_t stop_index, std::optional<std::size_t> exit_index = std::nullopt);

struct SimConfig {
  std::size_t n_paths = 10000;
  std::size_t n_steps = 200;
  std::uint64_t seed = 20240601;
  bool antithetic = false;
};

struct Estimate {
  double mean = 0.0;
  double se = 0.0;
  std::size_t n = 0;
};

/// Sum by recursive halving; the result depends only on the input order.
double pairwise_sum(std::span<const double> xs);
Estimate summarize(std::span<const double> samples);

/// Payoff of one strategy pair along the path driven by dW from (t0, x0).
double play(const GameSpec& spec, const GameCurves& curves, const StrategyPair& pair, double t0, double x0,
            double dt, std::span<const double> dW);

/// Per-path payoffs, one row per pair, sharing the Brownian driver of each
/// path across pairs. Path i draws from path_seed(cfg.seed, i). With
/// antithetic set, sample i averages the payoffs of dW and -dW. The parallel
/// and serial versions return identical arrays.
std::vector<std::vector<double>> payoff_samples(const GameSpec& spec, const GameCurves& curves,
                                                std::span<const StrategyPair> pairs, double t0, double x0,
                                                const SimConfig& cfg);
std::vector<std::vector<double>> payoff_samples_serial(const GameSpec& spec, const GameCurves& curves,
                                                       std::span<const StrategyPair> pairs, double t0, double x0,
                                                       const SimConfig& cfg);

Estimate estimate_value(const GameSpec& spec, const GameCurves& curves, const StrategyPair& pair, double t0,
                        double x0, const SimConfig& cfg);
Estimate estimate_value_serial(const GameSpec& spec, const GameCurves& curves, const StrategyPair& pair, double t0,
                               double x0, const SimConfig& cfg);

struct SuiteConfig {
  SimConfig sim;
  std::vector<double> fixed_times{0.0, 0.25, 0.5, 0.75, 1.0};  ///< fractions of T - t0
  double shift = 0.1;
  std::vector<double> constants{1.5, 2.5};
  double allowance_c = 0.0;  ///< margin term c (sqrt(dt) + dx)
};

struct DeviationVerdict {
  std::string name;
  std::string player;     ///< "stopper" or "controller"
  std::string direction;  ///< inequality tested on J(dev) - J(eq)
  Estimate estimate;
  double diff = 0.0;     ///< J(dev) - J(eq), same paths
  double diff_se = 0.0;  ///< standard error of the paired difference
  double margin = 0.0;
  bool passed = false;
  bool strict = false;  ///< suboptimal by more than 5 diff_se
};

struct SaddleReport {
  std::string header;
  double t0 = 0.0;
  double x0 = 0.0;
  double v_pde = 0.0;
  Estimate equilibrium;
  double allowance = 0.0;
  double equilibrium_margin = 0.0;
  bool equilibrium_passed = false;
  std::vector<DeviationVerdict> deviations;

  bool all_passed() const;
  bool strict_stopper() const;
  bool strict_controller() const;
};

/// Menu: FixedTime for each fraction, ThresholdShift +-shift, NoControl,
/// ReflectAtShifted +-shift, ReflectAtConstant for each constant. Throws
/// PreconditionFailure when b(t0) is missing, at the window edge, or not above
/// inf O.
SaddleReport deviation_suite(const GameSpec& spec, const ValueSurface& surface, const BoundaryPair& pair, double t0,
                             double x0, const SuiteConfig& cfg);

/// Least-squares slope through the origin of |J - v| against sqrt(dt) + dx.
double fit_allowance(std::span<const double> abs_errors, std::span<const double> scales);

}  // namespace scg
