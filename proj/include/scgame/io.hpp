#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include <json.hpp>

#include "scgame/aux_stop.hpp"
#include "scgame/boundaries.hpp"
#include "scgame/game_sim.hpp"
#include "scgame/model.hpp"
#include "scgame/sde.hpp"
#include "scgame/vi_solver.hpp"

namespace scg {

using json = nlohmann::ordered_json;

/// %.17g; infinities as inf / -inf.
std::string format_double(double v);

/// Finite numbers as JSON numbers, infinities as the strings "inf" / "-inf".
json json_number(double v);
double number_from_json(const json& j);

std::uint64_t fnv1a(std::string_view bytes);
std::string hex64(std::uint64_t h);

/// Writes to a sibling temporary file and renames it into place.
void write_atomic(const std::filesystem::path& path, std::string_view content);
std::string read_file(const std::filesystem::path& path);

std::string surface_csv(const ValueSurface& s, const ResidualFields* residuals = nullptr);
std::string boundary_csv(const BoundaryPair& p);
std::string aux_csv(const AuxSurface& a);

/// One row per (path, step): path,t,x,nu,a,b with the curves evaluated at the
/// path times (columns omitted when curves is null).
std::string paths_csv(const std::vector<ReflectedPath>& paths, const GameCurves* curves = nullptr);

json grid_json(const Grid& g);
json spec_json(const GameSpec& s);
/// Hash of the canonical spec description.
std::string spec_hash(const GameSpec& s);

/// Binary container: the bytes "VSURF1\n", an 8-byte little-endian header
/// length, the JSON header, then little-endian doubles t_nodes, x_nodes,
/// obstacle, v, vx, vxx.
std::string surface_binary(const ValueSurface& s, const json& extra_header);
/// Throws ConfigError for malformed containers.
ValueSurface read_surface_binary(std::string_view bytes, json* header = nullptr);

BoundaryPair boundaries_from_csv(std::string_view text);

json to_json(const AssumptionReport& r);
json to_json(const BoundaryReport& r);
json to_json(const Discrepancy& d);
json to_json(const Estimate& e);
json to_json(const SaddleReport& r);

/// Plain-text rendering of a saddle report for stderr.
std::string saddle_table(const SaddleReport& r);

}  // namespace scg
