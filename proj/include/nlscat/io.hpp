#pragma once

// JSON serialisation of fields, far fields, datasets and reconstructions,
// and atomic file output.

#include <filesystem>
#include <string>

#include <json.hpp>

#include "nlscat/forward.hpp"
#include "nlscat/inverse.hpp"

namespace nlscat::io {

using nlohmann::json;

/// Complex vector as [[re, im], ...].
json complex_array(const CVector& v);
CVector parse_complex_array(const json& j, const std::string& path);
/// A scalar complex given as a number or [re, im].
cplx parse_complex(const json& j, const std::string& path);

json points_array(const std::vector<Point>& pts, int d);
std::vector<Point> parse_points(const json& j, int d, const std::string& path);

json directions_to_json(const DirectionSet& dirs);
DirectionsPtr directions_from_json(const json& j, const std::string& path);

json field_to_json(const ComplexField& f);
json farfield_to_json(const FarField& f);
FarField farfield_from_json(const json& j, const std::string& path);

std::string solve_report_text(const SolveReport& rep);

json dataset_to_json(const ScatteringDataset& data, const WaveContext& ctx);
/// Throws ConfigError with a field path on malformed input.
ScatteringDataset dataset_from_json(const json& j, WaveContext& ctx);

json reconstruction_to_json(const ReconstructionResult& res, const DiskGrid& grid);

/// Pretty-printed JSON with a trailing newline; key order is sorted, so output is deterministic.
std::string dump(const json& j);
json read_json(const std::filesystem::path& path);

/// Writes to a temporary sibling and renames it into place.
void write_atomic(const std::filesystem::path& path, const std::string& content);

}  // namespace nlscat::io
