#include "scgame/io.hpp"

#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <unistd.h>

#include "scgame/errors.hpp"

namespace scg {

static_assert(std::endian::native == std::endian::little, "binary container assumes a little-endian host");

std::string format_double(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

json json_number(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  return v;
}

double number_from_json(const json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return kInf;
    if (s == "-inf") return -kInf;
  }
  throw ConfigError("expected a number, got " + j.dump());
}

std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

void write_atomic(const std::filesystem::path& path, std::string_view content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open " + tmp.string() + " for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw Error("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string surface_csv(const ValueSurface& s, const ResidualFields* res) {
  const Grid& g = s.grid;
  std::string out = res ? "t,x,v,vx,vxx,pde_residual,max_min,min_max\n" : "t,x,v,vx,vxx\n";
  out.reserve(g.n_t() * g.n_x() * (res ? 160 : 100));
  for (std::size_t n = 0; n < g.n_t(); ++n) {
    for (std::size_t i = 0; i < g.n_x(); ++i) {
      const std::size_t k = g.index(n, i);
      out += format_double(g.t_nodes[n]) + ',' + format_double(g.x_nodes[i]) + ',' + format_double(s.v[k]) + ',' +
             format_double(s.vx[k]) + ',' + format_double(s.vxx[k]);
      if (res) {
        out += ',' + format_double(res->pde[k]) + ',' + format_double(res->max_min[k]) + ',' +
               format_double(res->min_max[k]);
      }
      out += '\n';
    }
  }
  return out;
}

std::string boundary_csv(const BoundaryPair& p) {
  std::string out = "t,a,b,a_at_window_edge,b_at_window_edge\n";
  for (std::size_t n = 0; n < p.t_nodes.size(); ++n) {
    out += format_double(p.t_nodes[n]) + ',' + format_double(p.a[n]) + ',' + format_double(p.b[n]) + ',' +
           (p.a_at_window_edge[n] ? '1' : '0') + ',' + (p.b_at_window_edge[n] ? '1' : '0') + '\n';
  }
  return out;
}

std::string aux_csv(const AuxSurface& a) {
  const Grid& g = a.grid;
  std::string out = "t,x,w,absorbed\n";
  for (std::size_t n = 0; n < g.n_t(); ++n) {
    for (std::size_t i = 0; i < g.n_x(); ++i) {
      const std::size_t k = g.index(n, i);
      out += format_double(g.t_nodes[n]) + ',' + format_double(g.x_nodes[i]) + ',' + format_double(a.w[k]) + ',' +
             (a.absorbed_mask[k] ? '1' : '0') + '\n';
    }
  }
  return out;
}

std::string paths_csv(const std::vector<ReflectedPath>& paths, const GameCurves* curves) {
  std::string out = curves ? "path,t,x,nu,a,b\n" : "path,t,x,nu\n";
  for (std::size_t p = 0; p < paths.size(); ++p) {
    const auto& r = paths[p];
    for (std::size_t k = 0; k < r.x.size(); ++k) {
      out += std::to_string(p) + ',' + format_double(r.times[k]) + ',' + format_double(r.x[k]) + ',' +
             format_double(r.nu.empty() ? 0.0 : r.nu[k]);
      if (curves) out += ',' + format_double(curves->a(r.times[k])) + ',' + format_double(curves->b(r.times[k]));
      out += '\n';
    }
  }
  return out;
}

json grid_json(const Grid& g) {
  return {{"domain", to_string(g.domain)}, {"n_t", g.n_t()},         {"n_x", g.n_x()},
          {"T", g.T()},                    {"x_min", g.x_min()},     {"x_max", g.x_max()},
          {"dt", g.dt},                    {"dx", g.dx},             {"truncation_margin", json_number(g.truncation_margin)}};
}

json spec_json(const GameSpec& s) {
  return {{"family", s.family},
          {"domain", to_string(s.domain)},
          {"mu", s.mu.description()},
          {"sigma0", s.sigma0},
          {"sigma1", s.sigma1},
          {"g", s.g.description()},
          {"h", s.h.description()},
          {"r", s.r},
          {"alpha0", s.alpha0},
          {"T", s.T}};
}

std::string spec_hash(const GameSpec& s) { return hex64(fnv1a(spec_json(s).dump())); }

namespace {

void put_array(std::string& out, const std::vector<double>& xs) {
  const std::size_t at = out.size();
  out.resize(at + xs.size() * sizeof(double));
  if (!xs.empty()) std::memcpy(out.data() + at, xs.data(), xs.size() * sizeof(double));
}

std::vector<double> get_array(std::string_view bytes, std::size_t& pos, std::size_t count) {
  if (pos + count * sizeof(double) > bytes.size()) throw ConfigError("surface container truncated");
  std::vector<double> xs(count);
  if (count) std::memcpy(xs.data(), bytes.data() + pos, count * sizeof(double));
  pos += count * sizeof(double);
  return xs;
}

constexpr std::string_view kMagic = "VSURF1\n";

}  // namespace

std::string surface_binary(const ValueSurface& s, const json& extra_header) {
  json header = extra_header;
  header["grid"] = grid_json(s.grid);
  header["scheme"] = to_string(s.scheme);
  header["alpha0"] = s.alpha0;
  if (s.scheme == SchemeKind::Penalized) {
    header["eps"] = s.penalization.eps;
    header["delta"] = s.penalization.delta;
  }
  const std::string h = header.dump();
  std::string out(kMagic);
  const std::uint64_t len = h.size();
  out.append(reinterpret_cast<const char*>(&len), sizeof len);
  out += h;
  put_array(out, s.grid.t_nodes);
  put_array(out, s.grid.x_nodes);
  put_array(out, s.obstacle);
  put_array(out, s.v);
  put_array(out, s.vx);
  put_array(out, s.vxx);
  return out;
}

ValueSurface read_surface_binary(std::string_view bytes, json* header_out) {
  if (bytes.substr(0, kMagic.size()) != kMagic) throw ConfigError("not a surface container (bad magic)");
  std::size_t pos = kMagic.size();
  std::uint64_t len = 0;
  if (bytes.size() < pos + sizeof len) throw ConfigError("surface container truncated");
  std::memcpy(&len, bytes.data() + pos, sizeof len);
  pos += sizeof len;
  if (bytes.size() < pos + len) throw ConfigError("surface container truncated");
  json header;
  try {
    header = json::parse(bytes.substr(pos, len));
  } catch (const json::exception& e) {
    throw ConfigError(std::string("surface header: ") + e.what());
  }
  pos += len;

  ValueSurface s;
  const json& g = header.at("grid");
  const std::size_t nt = g.at("n_t").get<std::size_t>(), nx = g.at("n_x").get<std::size_t>();
  s.grid.domain = domain_from_string(g.at("domain").get<std::string>());
  s.grid.dt = g.at("dt").get<double>();
  s.grid.dx = g.at("dx").get<double>();
  s.grid.truncation_margin = number_from_json(g.at("truncation_margin"));
  s.grid.t_nodes = get_array(bytes, pos, nt);
  s.grid.x_nodes = get_array(bytes, pos, nx);
  s.obstacle = get_array(bytes, pos, nt);
  s.v = get_array(bytes, pos, nt * nx);
  s.vx = get_array(bytes, pos, nt * nx);
  s.vxx = get_array(bytes, pos, nt * nx);
  s.alpha0 = header.at("alpha0").get<double>();
  s.scheme = header.at("scheme").get<std::string>() == to_string(SchemeKind::Penalized) ? SchemeKind::Penalized
                                                                                        : SchemeKind::Projected;
  if (s.scheme == SchemeKind::Penalized) {
    s.penalization.eps = header.at("eps").get<double>();
    s.penalization.delta = header.at("delta").get<double>();
  }
  if (header_out) *header_out = std::move(header);
  return s;
}

BoundaryPair boundaries_from_csv(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  if (!std::getline(in, line) || line != "t,a,b,a_at_window_edge,b_at_window_edge")
    throw ConfigError("boundary file: unexpected header");
  BoundaryPair p;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    std::istringstream fields(line);
    std::string f[5];
    for (auto& s : f) {
      if (!std::getline(fields, s, ',')) throw ConfigError("boundary file: short row " + std::to_string(row));
    }
    try {
      p.t_nodes.push_back(std::stod(f[0]));
      p.a.push_back(std::stod(f[1]));
      p.b.push_back(std::stod(f[2]));
    } catch (const std::exception&) {
      throw ConfigError("boundary file: malformed number in row " + std::to_string(row));
    }
    p.a_at_window_edge.push_back(f[3] == "1");
    p.b_at_window_edge.push_back(f[4] == "1");
  }
  return p;
}

json to_json(const AssumptionReport& r) {
  json clauses = json::array();
  for (const auto& c : r.clauses) {
    json w = json::array();
    for (const auto& x : c.witnesses) w.push_back({{"t", x.t}, {"x", x.x}, {"observed", json_number(x.observed)}});
    clauses.push_back({{"id", c.id}, {"description", c.description}, {"passed", c.passed}, {"witnesses", w}});
  }
  return {{"all_passed", r.all_passed()}, {"k1", json_number(r.k1)}, {"clauses", clauses}};
}

json to_json(const BoundaryReport& r) {
  json vs = json::array();
  for (const auto& v : r.verdicts) {
    json j{{"id", v.id}, {"passed", v.passed}, {"skipped", v.skipped}, {"observed", json_number(v.observed)}};
    j["first_offending"] = v.first_offending ? json(*v.first_offending) : json(nullptr);
    if (!v.note.empty()) j["note"] = v.note;
    vs.push_back(std::move(j));
  }
  return {{"all_passed", r.all_passed()}, {"degenerate", r.degenerate}, {"notes", r.notes}, {"verdicts", vs}};
}

json to_json(const Discrepancy& d) {
  return {{"sup", d.sup},         {"l1", d.l1},           {"count", d.count},
          {"worst_t", d.worst_t}, {"worst_x", d.worst_x}, {"worst_index", {d.worst_n, d.worst_i}}};
}

json to_json(const Estimate& e) { return {{"mean", e.mean}, {"se", e.se}, {"n", e.n}}; }

json to_json(const SaddleReport& r) {
  json devs = json::array();
  for (const auto& d : r.deviations) {
    devs.push_back({{"name", d.name},
                    {"player", d.player},
                    {"direction", d.direction},
                    {"estimate", to_json(d.estimate)},
                    {"diff", d.diff},
                    {"diff_se", d.diff_se},
                    {"margin", d.margin},
                    {"passed", d.passed},
                    {"strict", d.strict}});
  }
  return {{"header", r.header},
          {"t0", r.t0},
          {"x0", r.x0},
          {"v_pde", r.v_pde},
          {"equilibrium", to_json(r.equilibrium)},
          {"allowance", r.allowance},
          {"equilibrium_margin", r.equilibrium_margin},
          {"equilibrium_passed", r.equilibrium_passed},
          {"deviations", devs},
          {"strict_stopper", r.strict_stopper()},
          {"strict_controller", r.strict_controller()},
          {"all_passed", r.all_passed()}};
}

std::string saddle_table(const SaddleReport& r) {
  std::string out = r.header + "\n";
  char buf[256];
  std::snprintf(buf, sizeof buf, "v(%g, %g) = %.6f   J(eq) = %.6f +- %.2e   margin %.2e   %s\n", r.t0, r.x0, r.v_pde,
                r.equilibrium.mean, r.equilibrium.se, r.equilibrium_margin, r.equilibrium_passed ? "ok" : "FAIL");
  out += buf;
  for (const auto& d : r.deviations) {
    std::snprintf(buf, sizeof buf, "  %-11s %-28s J = %.6f  diff = %+.3e (se %.1e, margin %.1e)  %s%s\n",
                  d.player.c_str(), d.name.c_str(), d.estimate.mean, d.diff, d.diff_se, d.margin,
                  d.passed ? "ok" : "FAIL", d.strict ? "  strict" : "");
    out += buf;
  }
  return out;
}

}  // namespace scg
