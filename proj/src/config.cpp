#include "scgame/config.hpp"

#include <set>

#include "scgame/errors.hpp"

namespace scg {

namespace {

// Typed access to one table with the key path prefixed to every error.
class Table {
 public:
  Table(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(path_ + ": expected a table");
  }

  std::string where(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }
  bool has(const std::string& key) const { return j_.contains(key); }

  double num(const std::string& key, double fallback) const {
    if (!has(key)) return fallback;
    return num_required(key);
  }
  double num_required(const std::string& key) const {
    if (!has(key)) throw ConfigError(where(key) + ": missing");
    const json& v = j_.at(key);
    if (!v.is_number()) throw ConfigError(where(key) + ": expected a number");
    return v.get<double>();
  }
  std::size_t count(const std::string& key, std::size_t fallback) const {
    if (!has(key)) return fallback;
    const json& v = j_.at(key);
    if (!v.is_number_integer() || v.get<long long>() < 0) throw ConfigError(where(key) + ": expected a non-negative integer");
    return v.get<std::size_t>();
  }
  std::uint64_t u64(const std::string& key, std::uint64_t fallback) const {
    if (!has(key)) return fallback;
    const json& v = j_.at(key);
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0))
      throw ConfigError(where(key) + ": expected a non-negative integer");
    return v.get<std::uint64_t>();
  }
  std::string str(const std::string& key, const std::string& fallback) const {
    if (!has(key)) return fallback;
    const json& v = j_.at(key);
    if (!v.is_string()) throw ConfigError(where(key) + ": expected a string");
    return v.get<std::string>();
  }
  bool flag(const std::string& key, bool fallback) const {
    if (!has(key)) return fallback;
    const json& v = j_.at(key);
    if (!v.is_boolean()) throw ConfigError(where(key) + ": expected true or false");
    return v.get<bool>();
  }
  std::vector<double> nums(const std::string& key, std::vector<double> fallback) const {
    if (!has(key)) return fallback;
    const json& v = j_.at(key);
    if (!v.is_array()) throw ConfigError(where(key) + ": expected an array of numbers");
    std::vector<double> out;
    for (const auto& e : v) {
      if (!e.is_number()) throw ConfigError(where(key) + ": expected an array of numbers");
      out.push_back(e.get<double>());
    }
    return out;
  }
  Table sub(const std::string& key) const {
    static const json empty = json::object();
    return Table(has(key) ? j_.at(key) : empty, where(key));
  }
  void only(const std::set<std::string>& allowed) const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!allowed.count(it.key())) throw ConfigError(where(it.key()) + ": unknown key");
    }
  }

 private:
  const json& j_;
  std::string path_;
};

// Rethrows library errors with the key path in front.
template <class F>
auto located(const std::string& where, F&& f) {
  try {
    return f();
  } catch (const ConfigError& e) {
    throw ConfigError(where + ": " + e.what());
  } catch (const Error& e) {
    throw ConfigError(where + ": " + e.what());
  }
}

GameSpec parse_model(const Table& m) {
  const std::string family = m.str("family", "benchmark");
  BenchmarkParams bp;
  bp.r = m.num("r", 0.1);
  bp.alpha0 = m.num("alpha0", 2.0);
  bp.T = m.num("T", 1.0);
  if (!(bp.alpha0 > 0.0)) throw ConfigError(m.where("alpha0") + ": must be positive");
  if (!(bp.T > 0.0)) throw ConfigError(m.where("T") + ": must be positive");
  if (!(bp.r >= 0.0)) throw ConfigError(m.where("r") + ": must be non-negative");

  if (family == "benchmark") {
    m.only({"family", "r", "alpha0", "T", "kappa1", "kappa2", "mu", "sigma"});
    return located("model", [&] {
      return benchmark_spec(m.num("kappa1", 1.0), m.num("kappa2", 1.0), m.num("mu", 0.05), m.num("sigma", 0.4), bp);
    });
  }
  if (family == "real_line_linear") {
    m.only({"family", "r", "alpha0", "T", "beta", "c", "sigma0", "kappa1", "kappa2", "g0", "g1"});
    return located("model", [&] {
      return real_line_spec(m.num("beta", 0.0), m.num("c", 0.0), m.num_required("sigma0"), m.num("kappa1", 1.0),
                            m.num("kappa2", 1.0), m.num("g0", 0.0), m.num("g1", 0.0), bp);
    });
  }
  if (family == "power_drift") {
    m.only({"family", "r", "alpha0", "T", "p", "n", "c", "kappa1", "kappa2", "sigma"});
    return located("model", [&] {
      return power_drift_spec(m.num_required("p"), m.num_required("n"), m.num("c", 0.0), m.num("kappa1", 1.0),
                              m.num("kappa2", 1.0), m.num("sigma", 0.4), bp);
    });
  }
  if (family == "custom") {
    m.only({"family", "r", "alpha0", "T", "domain", "mu", "sigma0", "sigma1", "g", "h"});
    GameSpec s;
    s.family = "custom";
    s.domain = located(m.where("domain"), [&] { return domain_from_string(m.str("domain", "half_line")); });
    s.mu = located(m.where("mu"), [&] { return ScalarFn::parse(m.str("mu", "0")); });
    s.g = located(m.where("g"), [&] { return ScalarFn::parse(m.str("g", "0")); });
    s.h = located(m.where("h"), [&] { return ScalarFn::parse(m.str("h", "")); });
    s.sigma0 = m.num("sigma0", 0.0);
    s.sigma1 = m.num("sigma1", 0.0);
    s.r = bp.r;
    s.alpha0 = bp.alpha0;
    s.T = bp.T;
    located("model", [&] {
      s.validate();
      return 0;
    });
    return s;
  }
  throw ConfigError(m.where("family") + ": unknown family '" + family +
                    "' (expected benchmark, real_line_linear, power_drift or custom)");
}

}  // namespace

RunConfig parse_config(const json& doc) {
  const Table root(doc, "");
  root.only({"model", "grid", "probes", "solver", "simulation", "output"});
  RunConfig cfg;
  cfg.model_section = doc.contains("model") ? doc.at("model") : json::object();
  cfg.spec = parse_model(root.sub("model"));

  const Table g = root.sub("grid");
  g.only({"n_t", "n_x", "x_min", "x_max", "spacing", "margin_min"});
  cfg.grid.n_t = g.count("n_t", 201);
  cfg.grid.n_x = g.count("n_x", 801);
  cfg.grid.x_min = g.num("x_min", cfg.spec.domain == Domain::HalfLine ? 0.0 : -5.0);
  cfg.grid.x_max = g.num("x_max", cfg.spec.domain == Domain::HalfLine ? 4.0 : 5.0);
  cfg.grid.spacing = g.str("spacing", "uniform");
  cfg.grid.margin_min = g.num("margin_min", 2.0);
  if (cfg.grid.n_t < 2) throw ConfigError("grid.n_t: must be at least 2");
  if (cfg.grid.n_x < 3) throw ConfigError("grid.n_x: must be at least 3");
  if (cfg.grid.spacing != "uniform") throw ConfigError("grid.spacing: only 'uniform' is supported");

  const Table p = root.sub("probes");
  p.only({"n_t", "n_x", "x_lo", "x_hi"});
  cfg.probes.n_t = static_cast<int>(p.count("n_t", 64));
  cfg.probes.n_x = static_cast<int>(p.count("n_x", 256));
  cfg.probes.x_lo = p.num("x_lo", cfg.grid.x_min);
  cfg.probes.x_hi = p.num("x_hi", cfg.grid.x_max);

  const Table s = root.sub("solver");
  s.only({"scheme", "eps_schedule", "newton_tol", "newton_max_iters", "fp_tol", "fp_max", "grad_tol"});
  const std::string scheme = s.str("scheme", "penalized");
  if (scheme == "penalized") {
    cfg.solver.scheme = SchemeKind::Penalized;
  } else if (scheme == "projected") {
    cfg.solver.scheme = SchemeKind::Projected;
  } else {
    throw ConfigError(s.where("scheme") + ": expected 'penalized' or 'projected'");
  }
  cfg.solver.eps_schedule = s.nums("eps_schedule", {1e-6});
  if (cfg.solver.eps_schedule.empty()) throw ConfigError(s.where("eps_schedule") + ": must not be empty");
  for (double e : cfg.solver.eps_schedule) {
    if (!(e > 0.0 && e < 1.0)) throw ConfigError(s.where("eps_schedule") + ": entries must lie in (0, 1)");
  }
  cfg.solver.penalization.newton_tol = s.num("newton_tol", 1e-11);
  cfg.solver.penalization.newton_max_iters = static_cast<int>(s.count("newton_max_iters", 60));
  cfg.solver.projection.fp_tol = s.num("fp_tol", 1e-13);
  cfg.solver.projection.fp_max = static_cast<int>(s.count("fp_max", 500));
  cfg.solver.grad_tol = s.num("grad_tol", 0.0);

  const Table m = root.sub("simulation");
  m.only({"t0", "x0", "n_paths", "n_steps", "seed", "antithetic", "sample_paths", "fixed_times", "shift",
          "constants", "allowance_c"});
  auto& sim = cfg.simulation;
  sim.t0 = m.num("t0", 0.0);
  sim.x0 = m.num("x0", 1.0);
  sim.sample_paths = m.count("sample_paths", 20);
  sim.suite.sim.n_paths = m.count("n_paths", 100000);
  sim.suite.sim.n_steps = m.count("n_steps", 200);
  sim.suite.sim.seed = m.u64("seed", 20240601);
  sim.suite.sim.antithetic = m.flag("antithetic", false);
  sim.suite.fixed_times = m.nums("fixed_times", sim.suite.fixed_times);
  sim.suite.shift = m.num("shift", sim.suite.shift);
  sim.suite.constants = m.nums("constants", sim.suite.constants);
  sim.suite.allowance_c = m.num("allowance_c", sim.suite.allowance_c);
  if (sim.suite.sim.n_paths == 0) throw ConfigError(m.where("n_paths") + ": must be positive");
  if (sim.suite.sim.n_steps == 0) throw ConfigError(m.where("n_steps") + ": must be positive");
  if (!(sim.t0 >= 0.0 && sim.t0 < cfg.spec.T)) throw ConfigError(m.where("t0") + ": must lie in [0, T)");
  located(m.where("x0"), [&] {
    cfg.spec.check_state(sim.x0);
    return 0;
  });

  const Table o = root.sub("output");
  o.only({"dir", "csv"});
  cfg.output.dir = o.str("dir", "out");
  cfg.output.csv = o.flag("csv", true);
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ": byte " + std::to_string(e.byte) + ": " + e.what());
  }
  return parse_config(doc);
}

json resolved_config(const RunConfig& c) {
  const auto& sim = c.simulation;
  json model = c.model_section;
  model["family"] = model.value("family", std::string("benchmark"));
  model["r"] = c.spec.r;
  model["alpha0"] = c.spec.alpha0;
  model["T"] = c.spec.T;
  return {{"model", model},
          {"grid",
           {{"n_t", c.grid.n_t},
            {"n_x", c.grid.n_x},
            {"x_min", c.grid.x_min},
            {"x_max", c.grid.x_max},
            {"spacing", c.grid.spacing},
            {"margin_min", c.grid.margin_min}}},
          {"probes", {{"n_t", c.probes.n_t}, {"n_x", c.probes.n_x}, {"x_lo", c.probes.x_lo}, {"x_hi", c.probes.x_hi}}},
          {"solver",
           {{"scheme", to_string(c.solver.scheme)},
            {"eps_schedule", c.solver.eps_schedule},
            {"newton_tol", c.solver.penalization.newton_tol},
            {"newton_max_iters", c.solver.penalization.newton_max_iters},
            {"fp_tol", c.solver.projection.fp_tol},
            {"fp_max", c.solver.projection.fp_max},
            {"grad_tol", c.solver.grad_tol}}},
          {"simulation",
           {{"t0", sim.t0},
            {"x0", sim.x0},
            {"n_paths", sim.suite.sim.n_paths},
            {"n_steps", sim.suite.sim.n_steps},
            {"seed", sim.suite.sim.seed},
            {"antithetic", sim.suite.sim.antithetic},
            {"sample_paths", sim.sample_paths},
            {"fixed_times", sim.suite.fixed_times},
            {"shift", sim.suite.shift},
            {"constants", sim.suite.constants},
            {"allowance_c", sim.suite.allowance_c}}},
          {"output", {{"dir", c.output.dir}, {"csv", c.output.csv}}}};
}

}  // namespace scg
