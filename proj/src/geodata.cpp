#include "gwpcor/geodata.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <sstream>

namespace gwpcor {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct RingMoments {
    double area = 0.0; // unsigned
    Coord centroid;
};

RingMoments ring_moments(const Ring& ring)
{
    RingMoments out;
    if (ring.size() < 3) return out;
    // Shift to the first vertex to keep the cross products well conditioned.
    const Coord o = ring.front();
    double a2 = 0.0;
    double cx = 0.0;
    double cy = 0.0;
    for (std::size_t k = 0; k < ring.size(); ++k) {
        const Coord p{ring[k].x - o.x, ring[k].y - o.y};
        const Coord& nxt = ring[(k + 1) % ring.size()];
        const Coord q{nxt.x - o.x, nxt.y - o.y};
        const double cross = p.x * q.y - q.x * p.y;
        a2 += cross;
        cx += (p.x + q.x) * cross;
        cy += (p.y + q.y) * cross;
    }
    if (a2 == 0.0) return out;
    out.area = std::abs(a2) * 0.5;
    out.centroid = {o.x + cx / (3.0 * a2), o.y + cy / (3.0 * a2)};
    return out;
}

double parse_number(std::string_view text)
{
    while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
    while (!text.empty() && (text.back() == ' ' || text.back() == '\t' || text.back() == '\r')) text.remove_suffix(1);
    if (text.empty()) return kNaN;
    if (text.front() == '+') text.remove_prefix(1);
    double value = kNaN;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(value)) return kNaN;
    return value;
}

Coord json_position(const Json& pos)
{
    if (!pos.is_array() || pos.size() < 2 || !pos[0].is_number() || !pos[1].is_number()) {
        throw Error(ErrorKind::MalformedInput, "position must be an array of at least two numbers");
    }
    return {pos[0].get<double>(), pos[1].get<double>()};
}

PolygonRings json_polygon(const Json& rings)
{
    if (!rings.is_array() || rings.empty()) throw Error(ErrorKind::MalformedInput, "polygon without rings");
    PolygonRings out;
    for (const auto& ring : rings) {
        if (!ring.is_array() || ring.size() < 3) {
            throw Error(ErrorKind::MalformedInput, "polygon ring needs at least three positions");
        }
        Ring r;
        r.reserve(ring.size());
        for (const auto& pos : ring) r.push_back(json_position(pos));
        out.push_back(std::move(r));
    }
    return out;
}

struct ParsedGeometry {
    GeometryKind kind;
    Coord anchor;
};

ParsedGeometry parse_geometry(const Json& geometry)
{
    if (!geometry.is_object() || !geometry.contains("type")) {
        throw Error(ErrorKind::MalformedInput, "feature without a geometry");
    }
    const std::string type = geometry.at("type").get<std::string>();
    if (type == "Point") return {GeometryKind::Point, json_position(geometry.at("coordinates"))};
    if (type == "Polygon") {
        const std::vector<PolygonRings> parts{json_polygon(geometry.at("coordinates"))};
        return {GeometryKind::Polygon, representative_point(parts)};
    }
    if (type == "MultiPolygon") {
        const auto& coords = geometry.at("coordinates");
        if (!coords.is_array() || coords.empty()) throw Error(ErrorKind::MalformedInput, "empty MultiPolygon");
        std::vector<PolygonRings> parts;
        for (const auto& poly : coords) parts.push_back(json_polygon(poly));
        return {GeometryKind::Polygon, representative_point(parts)};
    }
    throw Error(ErrorKind::MixedGeometry, "unsupported geometry type '" + type + "'; expected points or polygons");
}

bool looks_like_lonlat(std::span<const Coord> coords)
{
    return std::all_of(coords.begin(), coords.end(), [](const Coord& c) {
        return c.x >= -180.0 && c.x <= 180.0 && c.y >= -90.0 && c.y <= 90.0;
    });
}

/// Local equirectangular projection about the coordinate centroid.
void project_lonlat(std::vector<Coord>& coords)
{
    double lon0 = 0.0;
    double lat0 = 0.0;
    for (const auto& c : coords) {
        lon0 += c.x;
        lat0 += c.y;
    }
    lon0 /= static_cast<double>(coords.size());
    lat0 /= static_cast<double>(coords.size());
    constexpr double rad = std::numbers::pi / 180.0;
    const double scale_x = kEarthRadius * std::cos(lat0 * rad);
    for (auto& c : coords) {
        c = {scale_x * (c.x - lon0) * rad, kEarthRadius * (c.y - lat0) * rad};
    }
}

void finish_coordinates(Dataset& d, CoordinateMode mode)
{
    const bool lonlat = mode == CoordinateMode::LonLat || (mode == CoordinateMode::Auto && looks_like_lonlat(d.coords));
    if (lonlat) {
        project_lonlat(d.coords);
        d.projected = true;
    }
}

VariableInfo summarize(const std::string& name, const std::vector<double>& column)
{
    VariableInfo info{name, 0, std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
    for (double v : column) {
        if (std::isnan(v)) {
            ++info.missing;
            continue;
        }
        info.min = std::min(info.min, v);
        info.max = std::max(info.max, v);
    }
    return info;
}

std::vector<std::string> split_csv_line(std::string_view line)
{
    std::vector<std::string> fields;
    std::string field;
    bool quoted = false;
    for (std::size_t k = 0; k < line.size(); ++k) {
        const char ch = line[k];
        if (quoted) {
            if (ch == '"') {
                if (k + 1 < line.size() && line[k + 1] == '"') {
                    field.push_back('"');
                    ++k;
                } else {
                    quoted = false;
                }
            } else {
                field.push_back(ch);
            }
        } else if (ch == '"') {
            quoted = true;
        } else if (ch == ',') {
            fields.push_back(std::move(field));
            field.clear();
        } else if (ch != '\r') {
            field.push_back(ch);
        }
    }
    if (quoted) throw Error(ErrorKind::MalformedInput, "unterminated quoted CSV field");
    fields.push_back(std::move(field));
    return fields;
}

std::string trim(std::string s)
{
    const auto first = s.find_first_not_of(" \t");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t");
    return s.substr(first, last - first + 1);
}

Json number_or_null(double v)
{
    if (std::isnan(v)) return nullptr;
    return v;
}

} // namespace

std::string_view to_string(GeometryKind kind)
{
    return kind == GeometryKind::Point ? "point" : "polygon";
}

std::vector<std::string> Dataset::variable_names() const
{
    std::vector<std::string> out;
    out.reserve(schema.size());
    for (const auto& v : schema) out.push_back(v.name);
    return out;
}

std::size_t Dataset::variable_index(std::string_view name) const
{
    for (std::size_t k = 0; k < schema.size(); ++k) {
        if (schema[k].name == name) return k;
    }
    throw Error(ErrorKind::SpecMismatch, "variable '" + std::string(name) + "' not in dataset");
}

Coord representative_point(std::span<const PolygonRings> parts)
{
    double area = 0.0;
    double sx = 0.0;
    double sy = 0.0;
    double vx = 0.0;
    double vy = 0.0;
    std::size_t vertices = 0;
    for (const auto& rings : parts) {
        for (std::size_t r = 0; r < rings.size(); ++r) {
            const Ring& ring = rings[r];
            const auto m = ring_moments(ring);
            const double sign = r == 0 ? 1.0 : -1.0;
            area += sign * m.area;
            sx += sign * m.area * m.centroid.x;
            sy += sign * m.area * m.centroid.y;

            std::size_t count = ring.size();
            if (count > 1 && ring.front().x == ring.back().x && ring.front().y == ring.back().y) --count;
            for (std::size_t k = 0; k < count; ++k) {
                vx += ring[k].x;
                vy += ring[k].y;
            }
            vertices += count;
        }
    }
    if (area > 0.0) return {sx / area, sy / area};
    if (vertices == 0) throw Error(ErrorKind::MalformedInput, "polygon without vertices");
    return {vx / static_cast<double>(vertices), vy / static_cast<double>(vertices)};
}

Dataset parse_geojson(std::string_view bytes, CoordinateMode mode)
{
    Json doc;
    try {
        doc = Json::parse(bytes.begin(), bytes.end());
    } catch (const Json::exception& e) {
        throw Error(ErrorKind::MalformedInput, std::string("invalid JSON: ") + e.what());
    }
    if (!doc.is_object() || doc.value("type", "") != "FeatureCollection" || !doc.contains("features") ||
        !doc["features"].is_array()) {
        throw Error(ErrorKind::MalformedInput, "expected a GeoJSON FeatureCollection");
    }
    const auto& features = doc["features"];
    if (features.empty()) throw Error(ErrorKind::EmptyCollection, "feature collection is empty");

    Dataset d;
    std::optional<GeometryKind> kind;
    std::vector<const Json*> properties;
    try {
        for (const auto& f : features) {
            if (!f.is_object() || f.value("type", "") != "Feature") {
                throw Error(ErrorKind::MalformedInput, "collection member is not a Feature");
            }
            const auto geom = parse_geometry(f.contains("geometry") ? f["geometry"] : Json());
            if (kind && *kind != geom.kind) {
                throw Error(ErrorKind::MixedGeometry, "collection mixes point and polygon geometries");
            }
            kind = geom.kind;
            d.geometries.push_back(f["geometry"]);
            d.coords.push_back(geom.anchor);
            static const Json no_properties;
            const Json* props = f.contains("properties") ? &f["properties"] : &no_properties;
            if (!props->is_null() && !props->is_object()) {
                throw Error(ErrorKind::MalformedInput, "feature properties must be an object");
            }
            properties.push_back(props);
        }
    } catch (const Json::exception& e) {
        throw Error(ErrorKind::MalformedInput, std::string("malformed feature: ") + e.what());
    }
    if (d.coords.size() < 3) {
        throw Error(ErrorKind::FewerThanThreeFeatures, "at least three features are required");
    }
    d.geometry_kind = *kind;

    // Candidate variables: keys of the first feature, kept when every feature
    // carries the key and at least one value is a number.
    std::vector<std::string> candidates;
    if (properties.front()->is_object()) {
        for (const auto& [key, value] : properties.front()->items()) candidates.push_back(key);
    }
    for (const auto& name : candidates) {
        std::vector<double> column;
        column.reserve(d.size());
        bool everywhere = true;
        bool any_numeric = false;
        for (const Json* props : properties) {
            if (!props->is_object() || !props->contains(name)) {
                everywhere = false;
                break;
            }
            const auto& v = (*props)[name];
            if (v.is_number() && std::isfinite(v.get<double>())) {
                column.push_back(v.get<double>());
                any_numeric = true;
            } else {
                column.push_back(kNaN);
            }
        }
        if (!everywhere || !any_numeric) continue;
        d.schema.push_back(summarize(name, column));
        d.columns.push_back(std::move(column));
    }

    finish_coordinates(d, mode);
    return d;
}

Dataset parse_point_csv(std::string_view bytes, std::string_view x_col, std::string_view y_col, CoordinateMode mode)
{
    std::vector<std::string_view> lines;
    std::size_t start = 0;
    while (start < bytes.size()) {
        auto end = bytes.find('\n', start);
        if (end == std::string_view::npos) end = bytes.size();
        auto line = bytes.substr(start, end - start);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (!line.empty()) lines.push_back(line);
        start = end + 1;
    }
    if (lines.empty()) throw Error(ErrorKind::EmptyCollection, "CSV input has no header row");

    auto header = split_csv_line(lines.front());
    for (auto& h : header) h = trim(h);
    auto column_of = [&](std::string_view name) -> std::size_t {
        auto it = std::find(header.begin(), header.end(), name);
        if (it == header.end()) throw Error(ErrorKind::MissingColumn, "CSV has no column '" + std::string(name) + "'");
        return static_cast<std::size_t>(it - header.begin());
    };
    const std::size_t xi = column_of(x_col);
    const std::size_t yi = column_of(y_col);

    const std::size_t rows = lines.size() - 1;
    std::vector<std::vector<double>> cells(header.size(), std::vector<double>(rows, kNaN));
    Dataset d;
    d.geometry_kind = GeometryKind::Point;
    for (std::size_t r = 0; r < rows; ++r) {
        const auto fields = split_csv_line(lines[r + 1]);
        if (fields.size() != header.size()) {
            throw Error(ErrorKind::MalformedInput, "CSV row " + std::to_string(r + 2) + " has " +
                                                       std::to_string(fields.size()) + " fields, header has " +
                                                       std::to_string(header.size()));
        }
        for (std::size_t c = 0; c < fields.size(); ++c) cells[c][r] = parse_number(fields[c]);
        const double x = cells[xi][r];
        const double y = cells[yi][r];
        if (std::isnan(x) || std::isnan(y)) {
            throw Error(ErrorKind::NonNumericCoordinate, "CSV row " + std::to_string(r + 2) + " has a non-numeric coordinate");
        }
        d.coords.push_back({x, y});
        d.geometries.push_back(Json{{"type", "Point"}, {"coordinates", Json::array({x, y})}});
    }
    if (rows < 3) throw Error(ErrorKind::FewerThanThreeFeatures, "at least three rows are required");

    for (std::size_t c = 0; c < header.size(); ++c) {
        if (c == xi || c == yi) continue;
        if (std::all_of(cells[c].begin(), cells[c].end(), [](double v) { return std::isnan(v); })) continue;
        d.schema.push_back(summarize(header[c], cells[c]));
        d.columns.push_back(std::move(cells[c]));
    }

    finish_coordinates(d, mode);
    return d;
}

CompleteCases listwise_complete(const Dataset& dataset, std::span<const std::string> variables)
{
    std::vector<std::size_t> index;
    index.reserve(variables.size());
    for (const auto& name : variables) index.push_back(dataset.variable_index(name));

    std::vector<std::size_t> kept;
    for (std::size_t r = 0; r < dataset.size(); ++r) {
        const bool complete = std::none_of(index.begin(), index.end(),
                                           [&](std::size_t c) { return std::isnan(dataset.columns[c][r]); });
        if (complete) kept.push_back(r);
    }
    if (kept.size() < 3) {
        throw Error(ErrorKind::TooFewComplete,
                    "only " + std::to_string(kept.size()) + " complete observations for the selected variables");
    }

    std::vector<std::vector<double>> columns(index.size());
    for (std::size_t c = 0; c < index.size(); ++c) {
        columns[c].reserve(kept.size());
        for (std::size_t r : kept) columns[c].push_back(dataset.columns[index[c]][r]);
    }
    std::vector<Coord> coords;
    coords.reserve(kept.size());
    for (std::size_t r : kept) coords.push_back(dataset.coords[r]);
    return {DataMatrix({variables.begin(), variables.end()}, std::move(columns)), std::move(coords), std::move(kept)};
}

std::string serialize_result(const Dataset& dataset, const GwSurface& surface, std::string_view var_a,
                             std::string_view var_b, std::span<const std::size_t> kept)
{
    if (kept.size() != surface.per_location.size()) {
        throw Error(ErrorKind::IndexMismatch, "kept indices do not match the surface length");
    }
    const std::size_t pair = surface.pair_index(var_a, var_b);
    const auto& a_col = dataset.columns[dataset.variable_index(var_a)];
    const auto& b_col = dataset.columns[dataset.variable_index(var_b)];

    // Row -> position in the surface, or npos for dropped rows.
    constexpr auto npos = static_cast<std::size_t>(-1);
    std::vector<std::size_t> slot(dataset.size(), npos);
    for (std::size_t k = 0; k < kept.size(); ++k) {
        if (kept[k] >= dataset.size() || (k > 0 && kept[k] <= kept[k - 1])) {
            throw Error(ErrorKind::IndexMismatch, "kept indices must be increasing and within the dataset");
        }
        slot[kept[k]] = k;
    }

    Json features = Json::array();
    for (std::size_t r = 0; r < dataset.size(); ++r) {
        Json props = Json::object();
        if (slot[r] == npos) {
            for (const char* key : {"coef", "pval", "valid", "sig_001", "sig_005", "value_a", "value_b", "effective_n"}) {
                props[key] = nullptr;
            }
        } else {
            const auto& local = surface.per_location[slot[r]];
            const bool valid = local.valid[pair] != 0;
            const double p = local.p_values[pair];
            props["coef"] = valid ? Json(local.coefficients[pair]) : Json(nullptr);
            props["pval"] = valid ? Json(p) : Json(nullptr);
            props["valid"] = valid;
            props["sig_001"] = valid && p <= 0.01;
            props["sig_005"] = valid && p <= 0.05;
            props["value_a"] = number_or_null(a_col[r]);
            props["value_b"] = number_or_null(b_col[r]);
            props["effective_n"] = local.effective_n;
        }
        features.push_back(Json{{"type", "Feature"}, {"geometry", dataset.geometries[r]}, {"properties", std::move(props)}});
    }
    Json doc{{"type", "FeatureCollection"}, {"features", std::move(features)}};
    return doc.dump();
}

std::string write_geojson(const Dataset& dataset)
{
    Json features = Json::array();
    for (std::size_t r = 0; r < dataset.size(); ++r) {
        Json props = Json::object();
        for (std::size_t c = 0; c < dataset.schema.size(); ++c) {
            props[dataset.schema[c].name] = number_or_null(dataset.columns[c][r]);
        }
        features.push_back(Json{{"type", "Feature"}, {"geometry", dataset.geometries[r]}, {"properties", std::move(props)}});
    }
    return Json{{"type", "FeatureCollection"}, {"features", std::move(features)}}.dump();
}

std::string write_point_csv(const Dataset& dataset, std::string_view x_col, std::string_view y_col)
{
    if (dataset.geometry_kind != GeometryKind::Point) {
        throw Error(ErrorKind::InvalidSpec, "only point datasets can be written as CSV");
    }
    std::ostringstream out;
    out.precision(17);
    out << x_col << ',' << y_col;
    for (const auto& v : dataset.schema) out << ',' << v.name;
    out << '\n';
    for (std::size_t r = 0; r < dataset.size(); ++r) {
        const Coord raw = json_position(dataset.geometries[r].at("coordinates"));
        out << raw.x << ',' << raw.y;
        for (const auto& column : dataset.columns) {
            out << ',';
            if (!std::isnan(column[r])) out << column[r];
        }
        out << '\n';
    }
    return out.str();
}

Json schema_to_json(const VariableSchema& schema)
{
    Json out = Json::array();
    for (const auto& v : schema) {
        out.push_back(Json{{"name", v.name}, {"missing", v.missing}, {"min", v.min}, {"max", v.max}});
    }
    return out;
}

} // namespace gwpcor
