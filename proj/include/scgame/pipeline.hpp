#pragma once

#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include "scgame/config.hpp"

namespace scg {

struct StageResult {
  bool passed = true;
  std::vector<std::string> failed;  ///< ids of failing verdicts
  std::vector<std::filesystem::path> written;
};

struct StageOptions {
  std::filesystem::path out_dir;
  bool force = false;      ///< run even when an assumption clause fails
  std::ostream* log = nullptr;
};

/// Hash of the model, grid and solver sections; stamps surface files so that
/// later stages reuse them only when the inputs still match.
std::string input_hash(const RunConfig& cfg);

/// Writes surface.bin, surface.csv, boundaries.csv, reports/assumptions.json,
/// reports/boundaries.json and manifest_solve.json. Throws AssumptionViolation
/// when an assumption clause fails and force is off.
StageResult run_solve(const RunConfig& cfg, const StageOptions& opts);

/// Writes aux.csv and reports/aux.json. Reuses surface files from run_solve
/// when their input hash matches; solves afresh otherwise.
StageResult run_aux(const RunConfig& cfg, const StageOptions& opts);

/// Writes paths.csv (sample reflected paths with a and b) and
/// reports/simulate.json.
StageResult run_simulate(const RunConfig& cfg, const StageOptions& opts);

/// Writes reports/verify.json with the saddle report and every property
/// report, and a plain-text table to the log.
StageResult run_verify(const RunConfig& cfg, const StageOptions& opts);

}  // namespace scg
