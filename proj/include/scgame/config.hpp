#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "scgame/game_sim.hpp"
#include "scgame/grid.hpp"
#include "scgame/io.hpp"
#include "scgame/model.hpp"
#include "scgame/vi_solver.hpp"

namespace scg {

struct SolverSection {
  SchemeKind scheme = SchemeKind::Penalized;
  std::vector<double> eps_schedule{1e-6};  ///< eps = delta, solved in order; the last one is kept
  PenalizationParams penalization;
  ProjectionParams projection;
  double grad_tol = 0.0;  ///< 0 selects 1e-3 alpha0
};

struct SimulationSection {
  double t0 = 0.0;
  double x0 = 1.0;
  std::size_t sample_paths = 20;  ///< paths dumped to CSV by the simulate stage
  SuiteConfig suite;
};

struct OutputSection {
  std::string dir = "out";
  bool csv = true;  ///< surface.bin and boundaries.csv are always written
};

struct RunConfig {
  GameSpec spec;
  GridConfig grid;
  ProbeLattice probes;
  SolverSection solver;
  SimulationSection simulation;
  OutputSection output;
  json model_section;  ///< the model table as given, echoed into manifests
};

/// Throws ConfigError whose message starts with the offending key path.
RunConfig parse_config(const json& doc);
RunConfig load_config(const std::filesystem::path& path);

/// Fully resolved configuration, defaults included; parse_config accepts it.
json resolved_config(const RunConfig& cfg);

}  // namespace scg
