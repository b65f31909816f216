// scgame: solve, aux, simulate and verify stages driven by a JSON config.
// Exit codes: 0 all verdicts pass, 1 a verdict failed, 2 config error,
// 3 solver or pipeline failure.

#include <omp.h>

#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "scgame/errors.hpp"
#include "scgame/pipeline.hpp"

namespace {

struct Flags {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  bool force = false;
  int threads = 0;
};

int run(const std::string& stage, const Flags& f) {
  scg::RunConfig cfg;
  try {
    cfg = scg::load_config(f.config);
  } catch (const scg::Error& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  }
  if (f.seed) cfg.simulation.suite.sim.seed = *f.seed;
  if (!f.out.empty()) cfg.output.dir = f.out;
  if (f.threads > 0) omp_set_num_threads(f.threads);

  scg::StageOptions opts{cfg.output.dir, f.force, &std::cerr};
  try {
    scg::StageResult res;
    if (stage == "solve") res = scg::run_solve(cfg, opts);
    else if (stage == "aux") res = scg::run_aux(cfg, opts);
    else if (stage == "simulate") res = scg::run_simulate(cfg, opts);
    else res = scg::run_verify(cfg, opts);
    for (const auto& id : res.failed) std::cerr << "verdict failed: " << id << '\n';
    std::cerr << stage << ": " << (res.passed ? "all verdicts pass" : "verdicts failed") << '\n';
    return res.passed ? 0 : 1;
  } catch (const scg::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const scg::WindowTooSmall& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const scg::AssumptionViolation& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const scg::Error& e) {
    std::cerr << "solver failure: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "failure: " << e.what() << '\n';
    return 3;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stopper versus singular controller games: PDE solves, boundaries, Monte Carlo checks"};
  app.require_subcommand(1);
  Flags flags;
  std::uint64_t seed = 0;
  for (const char* name : {"solve", "aux", "simulate", "verify"}) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--config", flags.config, "JSON config file")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", flags.out, "output directory (overrides output.dir)");
    sub->add_option("--seed", seed, "master seed (overrides simulation.seed)")->each([&](const std::string&) {
      flags.seed = seed;
    });
    sub->add_flag("--force", flags.force, "proceed when an assumption clause fails");
    sub->add_option("--threads", flags.threads, "worker threads for path loops")->check(CLI::PositiveNumber);
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, std::cerr, std::cerr);
    return code == 0 ? 0 : 2;
  }
  for (CLI::App* sub : app.get_subcommands()) return run(sub->get_name(), flags);
  return 2;
}
