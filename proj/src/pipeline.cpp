#include "scgame/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "scgame/aux_stop.hpp"
#include "scgame/errors.hpp"

namespace scg {

namespace {

namespace fs = std::filesystem;

std::string short_num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

void note(const StageOptions& o, const std::string& msg) {
  if (o.log) *o.log << msg << '\n';
}

void emit(StageResult& res, const fs::path& path, std::string_view content) {
  write_atomic(path, content);
  res.written.push_back(path);
}

void verdict(StageResult& res, const std::string& id, bool ok) {
  if (!ok) {
    res.passed = false;
    res.failed.push_back(id);
  }
}

struct Solved {
  ValueSurface surface;
  BoundaryPair boundaries;
  json schedule = json::array();
};

double grad_tol_of(const RunConfig& cfg) {
  return cfg.solver.grad_tol > 0.0 ? cfg.solver.grad_tol : 1e-3 * cfg.spec.alpha0;
}

Solved solve_all(const RunConfig& cfg, const Grid& grid, const StageOptions& o) {
  Solved s;
  if (cfg.solver.scheme == SchemeKind::Projected) {
    s.surface = solve_projected(cfg.spec, grid, cfg.solver.projection);
  } else {
    const std::vector<double>* prev = nullptr;
    ValueSurface last;
    for (double e : cfg.solver.eps_schedule) {
      PenalizationParams p = cfg.solver.penalization;
      p.eps = p.delta = e;
      ValueSurface cur = solve_penalized(cfg.spec, grid, p);
      json row{{"eps", e}};
      if (prev) {
        double gap = 0.0;
        for (std::size_t k = 0; k < cur.v.size(); ++k) gap = std::max(gap, std::abs(cur.v[k] - (*prev)[k]));
        row["sup_change"] = gap;
      }
      s.schedule.push_back(row);
      note(o, "solved penalized scheme with eps = delta = " + short_num(e));
      last = std::move(cur);
      prev = &last.v;
    }
    s.surface = std::move(last);
  }
  s.boundaries = extract_boundaries(s.surface, default_gap_tol(s.surface), grad_tol_of(cfg));
  return s;
}

// Surface and boundaries from an earlier solve when the inputs match.
Solved load_or_solve(const RunConfig& cfg, const StageOptions& o, StageResult& res) {
  const fs::path bin = o.out_dir / "surface.bin", bnd = o.out_dir / "boundaries.csv";
  if (fs::exists(bin) && fs::exists(bnd)) {
    json header;
    const std::string bytes = read_file(bin);
    ValueSurface s = read_surface_binary(bytes, &header);
    if (header.value("input_hash", "") == input_hash(cfg)) {
      note(o, "reusing " + bin.string());
      return {std::move(s), boundaries_from_csv(read_file(bnd)), json::array()};
    }
  }
  note(o, "no matching surface in " + o.out_dir.string() + "; solving");
  StageResult solve = run_solve(cfg, o);
  res.written.insert(res.written.end(), solve.written.begin(), solve.written.end());
  json header;
  ValueSurface s = read_surface_binary(read_file(bin), &header);
  return {std::move(s), boundaries_from_csv(read_file(bnd)), json::array()};
}

struct AuxOutcome {
  AuxSurface aux;
  json report;
  bool passed = true;
  std::vector<std::string> failed;
};

AuxOutcome aux_check(const RunConfig& cfg, const Solved& s) {
  AuxOutcome out;
  const Grid& grid = s.surface.grid;
  out.aux = solve_aux(cfg.spec, grid, s.boundaries.a, AuxBoundary::Absorb);
  const AuxSurface reflected = solve_aux(cfg.spec, grid, s.boundaries.a, AuxBoundary::Reflect);
  const Discrepancy d = compare_vx(out.aux, s.surface);
  const Discrepancy dr = compare_vx(reflected, s.surface);
  std::vector<char> edge;
  const auto sig = sigma_star_curve(out.aux, grad_tol_of(cfg), &edge);
  double worst = 0.0;
  std::size_t rows = 0;
  for (std::size_t n = 0; n + 1 < sig.size(); ++n) {
    if (!std::isfinite(sig[n]) || !std::isfinite(s.boundaries.b[n]) || edge[n] || s.boundaries.b_at_window_edge[n])
      continue;
    worst = std::max(worst, std::abs(sig[n] - s.boundaries.b[n]));
    ++rows;
  }
  const bool rep_ok = d.sup <= 0.05 * cfg.spec.alpha0;
  const bool sig_ok = worst <= 3.0 * grid.dx;
  const bool abs_ok = d.sup < dr.sup;
  out.report = {{"absorbed", to_json(d)},
                {"reflected", to_json(dr)},
                {"sigma_star_vs_b", {{"max_abs_diff", worst}, {"rows", rows}, {"tolerance", 3.0 * grid.dx}}},
                {"verdicts",
                 {{{"id", "vx_representation"}, {"passed", rep_ok}, {"tolerance", 0.05 * cfg.spec.alpha0}},
                  {{"id", "sigma_star_matches_b"}, {"passed", sig_ok}},
                  {{"id", "absorption_beats_reflection"}, {"passed", abs_ok}}}}};
  if (!rep_ok) out.failed.push_back("vx_representation");
  if (!sig_ok) out.failed.push_back("sigma_star_matches_b");
  if (!abs_ok) out.failed.push_back("absorption_beats_reflection");
  out.passed = out.failed.empty();
  return out;
}

json manifest(const RunConfig& cfg, const std::string& stage, const StageResult& res, const fs::path& out_dir) {
  json files = json::array();
  for (const auto& p : res.written) files.push_back(fs::relative(p, out_dir).generic_string());
  return {{"stage", stage},
          {"config", resolved_config(cfg)},
          {"spec", spec_json(cfg.spec)},
          {"input_hash", input_hash(cfg)},
          {"spec_hash", spec_hash(cfg.spec)},
          {"files", files},
          {"passed", res.passed},
          {"failed", res.failed}};
}

}  // namespace

std::string input_hash(const RunConfig& cfg) {
  const json r = resolved_config(cfg);
  return hex64(fnv1a(json{{"model", spec_json(cfg.spec)}, {"grid", r["grid"]}, {"solver", r["solver"]}}.dump()));
}

StageResult run_solve(const RunConfig& cfg, const StageOptions& o) {
  StageResult res;
  const AssumptionReport assumptions = validate_assumptions(cfg.spec, cfg.probes);
  if (!assumptions.all_passed()) {
    std::string ids;
    for (const auto& c : assumptions.clauses)
      if (!c.passed) ids += (ids.empty() ? "" : ", ") + c.id;
    if (!o.force) throw AssumptionViolation("assumption clauses failed: " + ids + " (use --force to proceed)");
    note(o, "warning: assumption clauses failed: " + ids);
  }
  const Grid grid = build_grid(cfg.spec, cfg.grid);
  Solved s = solve_all(cfg, grid, o);
  const ResidualFields residuals = residual_check(s.surface, cfg.spec, s.boundaries.a, s.boundaries.b);
  const BoundaryReport br = check_boundary_properties(s.boundaries, cfg.spec, s.surface);
  for (const auto& v : br.verdicts) verdict(res, v.id, v.passed);

  json header{{"input_hash", input_hash(cfg)}, {"spec_hash", spec_hash(cfg.spec)}, {"spec", spec_json(cfg.spec)}};
  emit(res, o.out_dir / "surface.bin", surface_binary(s.surface, header));
  if (cfg.output.csv) emit(res, o.out_dir / "surface.csv", surface_csv(s.surface, &residuals));
  emit(res, o.out_dir / "boundaries.csv", boundary_csv(s.boundaries));
  emit(res, o.out_dir / "reports" / "assumptions.json", to_json(assumptions).dump(2) + "\n");
  json bj = to_json(br);
  bj["residuals"] = {{"linf_max_min", residuals.linf_max_min},
                     {"l1_max_min", residuals.l1_max_min},
                     {"linf_min_max", residuals.linf_min_max},
                     {"l1_min_max", residuals.l1_min_max}};
  bj["eps_schedule"] = s.schedule;
  for (std::size_t n = 0; n + 1 < s.boundaries.b.size(); ++n) {
    if (std::isfinite(s.boundaries.b[n]) && s.boundaries.b[n] > grid.x_max() - 5.0 * grid.dx) {
      bj["notes"].push_back("b comes within 5 cells of x_max from t = " + format_double(grid.t_nodes[n]));
      note(o, "warning: b comes within 5 cells of x_max from t = " + short_num(grid.t_nodes[n]));
      break;
    }
  }
  emit(res, o.out_dir / "reports" / "boundaries.json", bj.dump(2) + "\n");
  res.written.push_back(o.out_dir / "manifest_solve.json");
  write_atomic(o.out_dir / "manifest_solve.json", manifest(cfg, "solve", res, o.out_dir).dump(2) + "\n");
  return res;
}

StageResult run_aux(const RunConfig& cfg, const StageOptions& o) {
  StageResult res;
  const Solved s = load_or_solve(cfg, o, res);
  AuxOutcome a = aux_check(cfg, s);
  for (const auto& id : a.failed) verdict(res, id, false);
  if (cfg.output.csv) emit(res, o.out_dir / "aux.csv", aux_csv(a.aux));
  emit(res, o.out_dir / "reports" / "aux.json", a.report.dump(2) + "\n");
  res.written.push_back(o.out_dir / "manifest_aux.json");
  write_atomic(o.out_dir / "manifest_aux.json", manifest(cfg, "aux", res, o.out_dir).dump(2) + "\n");
  return res;
}

StageResult run_simulate(const RunConfig& cfg, const StageOptions& o) {
  StageResult res;
  const Solved s = load_or_solve(cfg, o, res);
  const auto& sim = cfg.simulation;
  const Grid& grid = s.surface.grid;
  const auto n0 = static_cast<std::size_t>(std::llround(sim.t0 / grid.dt));
  if (n0 >= grid.n_t() || !std::isfinite(s.boundaries.b[n0]) || s.boundaries.b_at_window_edge[n0] ||
      !(s.boundaries.b[n0] > cfg.spec.inf_domain()))
    throw PreconditionFailure("action boundary at t0 is missing or at the window edge; nu* cannot be built");

  const GameCurves curves = curves_from(s.boundaries);
  const double dt = (cfg.spec.T - sim.t0) / static_cast<double>(sim.suite.sim.n_steps);
  std::vector<ReflectedPath> paths;
  bool below = true;
  for (std::size_t i = 0; i < sim.sample_paths; ++i) {
    const auto dW = brownian_increments(sim.suite.sim.n_steps, dt, path_seed(sim.suite.sim.seed, i));
    paths.push_back(skorokhod_reflect(cfg.spec, dW, curves.b, sim.t0, sim.x0, dt));
    for (std::size_t k = 0; k < paths.back().x.size(); ++k)
      below = below && paths.back().x[k] <= curves.b(paths.back().times[k]) + 1e-12;
  }
  const Estimate e = estimate_value(cfg.spec, curves, StrategyPair{}, sim.t0, sim.x0, sim.suite.sim);
  const double v = s.surface.interpolate(sim.t0, sim.x0);
  const double allowance = sim.suite.allowance_c * (std::sqrt(dt) + grid.dx);
  const bool ok = std::abs(e.mean - v) <= 3.0 * e.se + allowance;
  verdict(res, "equilibrium_matches_pde", ok);
  verdict(res, "sample_paths_below_b", below);
  note(o, "J(eq) = " + short_num(e.mean) + " +- " + short_num(e.se) + ", v = " + short_num(v));

  emit(res, o.out_dir / "paths.csv", paths_csv(paths, &curves));
  const json rep{{"t0", sim.t0},
                 {"x0", sim.x0},
                 {"equilibrium", to_json(e)},
                 {"v_pde", v},
                 {"allowance", allowance},
                 {"margin", 3.0 * e.se + allowance},
                 {"verdicts",
                  {{{"id", "equilibrium_matches_pde"}, {"passed", ok}}, {{"id", "sample_paths_below_b"}, {"passed", below}}}}};
  emit(res, o.out_dir / "reports" / "simulate.json", rep.dump(2) + "\n");
  res.written.push_back(o.out_dir / "manifest_simulate.json");
  write_atomic(o.out_dir / "manifest_simulate.json", manifest(cfg, "simulate", res, o.out_dir).dump(2) + "\n");
  return res;
}

StageResult run_verify(const RunConfig& cfg, const StageOptions& o) {
  StageResult res;
  const Solved s = load_or_solve(cfg, o, res);
  const auto& sim = cfg.simulation;

  const AssumptionReport assumptions = validate_assumptions(cfg.spec, cfg.probes);
  const BoundaryReport br = check_boundary_properties(s.boundaries, cfg.spec, s.surface);
  for (const auto& v : br.verdicts) verdict(res, v.id, v.passed);
  AuxOutcome a = aux_check(cfg, s);
  for (const auto& id : a.failed) verdict(res, id, false);
  const SaddleReport saddle = deviation_suite(cfg.spec, s.surface, s.boundaries, sim.t0, sim.x0, sim.suite);
  verdict(res, "equilibrium_matches_pde", saddle.equilibrium_passed);
  for (const auto& d : saddle.deviations) verdict(res, "deviation: " + d.name, d.passed);
  verdict(res, "strict_stopper_deviation", saddle.strict_stopper());
  verdict(res, "strict_controller_deviation", saddle.strict_controller());
  note(o, saddle_table(saddle));

  const json rep{{"passed", res.passed},
                 {"failed", res.failed},
                 {"saddle", to_json(saddle)},
                 {"assumptions", to_json(assumptions)},
                 {"boundaries", to_json(br)},
                 {"aux", a.report}};
  emit(res, o.out_dir / "reports" / "verify.json", rep.dump(2) + "\n");
  res.written.push_back(o.out_dir / "manifest_verify.json");
  write_atomic(o.out_dir / "manifest_verify.json", manifest(cfg, "verify", res, o.out_dir).dump(2) + "\n");
  return res;
}

}  // namespace scg
