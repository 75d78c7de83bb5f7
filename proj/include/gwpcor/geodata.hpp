#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "gwpcor/gw_engine.hpp"
#include "gwpcor/spatial_weights.hpp"

namespace gwpcor {

using Json = nlohmann::ordered_json;

enum class GeometryKind { Point, Polygon };
std::string_view to_string(GeometryKind kind);

/// How input coordinates are interpreted. Auto treats a dataset whose bounds
/// fit in [-180,180] x [-90,90] as lon/lat.
enum class CoordinateMode { Auto, Planar, LonLat };

/// Mean Earth radius used by the local projection, metres.
inline constexpr double kEarthRadius = 6371008.8;

struct VariableInfo {
    std::string name;
    std::size_t missing = 0;
    double min = 0.0;
    double max = 0.0;
};

using VariableSchema = std::vector<VariableInfo>;

/// Immutable after parsing; shared read-only between analyses.
struct Dataset {
    std::vector<Json> geometries;
    std::vector<Coord> coords;
    /// One column per schema variable; NaN marks a missing or non-numeric cell.
    std::vector<std::vector<double>> columns;
    VariableSchema schema;
    GeometryKind geometry_kind = GeometryKind::Point;
    bool projected = false;

    std::size_t size() const noexcept { return coords.size(); }
    std::vector<std::string> variable_names() const;
    /// Throws SpecMismatch for unknown names.
    std::size_t variable_index(std::string_view name) const;
};

using Ring = std::vector<Coord>;
using PolygonRings = std::vector<Ring>; // first ring is the shell, the rest are holes

/// Area-weighted centroid over all parts; holes subtract. Degenerate (zero
/// area) input falls back to the mean of the vertices.
Coord representative_point(std::span<const PolygonRings> parts);

Dataset parse_geojson(std::string_view bytes, CoordinateMode mode = CoordinateMode::Auto);
Dataset parse_point_csv(std::string_view bytes, std::string_view x_col, std::string_view y_col,
                        CoordinateMode mode = CoordinateMode::Auto);

struct CompleteCases {
    DataMatrix data;
    std::vector<Coord> coords;
    std::vector<std::size_t> kept;
};

/// Drops rows with a missing cell among `variables` only.
CompleteCases listwise_complete(const Dataset& dataset, std::span<const std::string> variables);

/// Result FeatureCollection for one displayed pair. Feature k mirrors input
/// feature k; rows absent from `kept` carry null result properties.
std::string serialize_result(const Dataset& dataset, const GwSurface& surface, std::string_view var_a,
                             std::string_view var_b, std::span<const std::size_t> kept);

/// Input-format writers, used for synthetic data and round trips.
std::string write_geojson(const Dataset& dataset);
std::string write_point_csv(const Dataset& dataset, std::string_view x_col = "x", std::string_view y_col = "y");

Json schema_to_json(const VariableSchema& schema);

} // namespace gwpcor
