#include "gwpcor/service.hpp"

#include <chrono>
#include <string_view>
#include <vector>

namespace gwpcor {

namespace {

std::vector<std::string_view> split_path(std::string_view path)
{
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    while (start <= path.size()) {
        const auto end = path.find('/', start);
        const auto part = path.substr(start, end == std::string_view::npos ? std::string_view::npos : end - start);
        if (!part.empty()) parts.push_back(part);
        if (end == std::string_view::npos) break;
        start = end + 1;
    }
    return parts;
}

HttpResponse json_response(int status, const Json& body)
{
    return {status, "application/json", body.dump()};
}

HttpResponse from_error(const Error& e)
{
    return error_response(http_status(e.kind()), to_string(e.kind()), e.what());
}

std::optional<std::string> query_value(const HttpRequest& request, const std::string& key)
{
    auto it = request.query.find(key);
    if (it == request.query.end()) return std::nullopt;
    return it->second;
}

bool truthy(const std::optional<std::string>& v)
{
    return v && (*v == "1" || *v == "true" || *v == "yes");
}

constexpr const char* kIndexPage =
    "<!doctype html><html><head><meta charset=\"utf-8\"><title>gwpcor</title></head><body>"
    "<h1>gwpcor service</h1><p>The web UI bundle is not installed. API endpoints:</p><ul>"
    "<li>POST /datasets</li><li>GET /datasets/{id}/variables</li><li>POST /analyses</li>"
    "<li>GET /analyses/{id}/result?pair=a,b</li><li>GET /analyses/{id}/scatter?pair=a,b</li>"
    "<li>GET /config</li></ul></body></html>";

} // namespace

int http_status(ErrorKind kind)
{
    switch (kind) {
    case ErrorKind::MalformedInput:
    case ErrorKind::MixedGeometry:
    case ErrorKind::EmptyCollection:
    case ErrorKind::FewerThanThreeFeatures:
    case ErrorKind::MissingColumn:
    case ErrorKind::NonNumericCoordinate:
        return 400;
    case ErrorKind::Timeout:
        return 504;
    default:
        return 422;
    }
}

HttpResponse error_response(int status, std::string_view kind, std::string_view message)
{
    return json_response(status, Json{{"error_kind", kind}, {"message", message}});
}

Service::Service(ServiceConfig config)
    : config_(std::move(config)), datasets_(config_.dataset_capacity), analyses_(config_.analysis_capacity)
{
}

HttpResponse Service::handle(const HttpRequest& request)
{
    const auto parts = split_path(request.path);
    const bool get = request.method == "GET";
    const bool post = request.method == "POST";
    try {
        if (parts.size() == 1 && parts[0] == "config" && get) return get_config();
        if (!parts.empty() && parts[0] == "datasets") {
            if (parts.size() == 1 && post) return upload_dataset(request);
            if (parts.size() == 2 && get) return dataset_info(std::string(parts[1]));
            if (parts.size() == 3 && parts[2] == "variables" && get) return list_variables(std::string(parts[1]));
        }
        if (!parts.empty() && parts[0] == "analyses") {
            if (parts.size() == 1 && post) return run_analysis(request.body);
            if (parts.size() == 3 && get) {
                const auto pair = query_value(request, "pair");
                if (parts[2] == "result") return get_result(std::string(parts[1]), pair);
                if (parts[2] == "scatter") return get_scatter(std::string(parts[1]), pair);
            }
        }
        if (parts.empty() && get) return {200, "text/html", kIndexPage};
        return error_response(404, "NotFound", "no route for " + request.method + " " + request.path);
    } catch (const Error& e) {
        return from_error(e);
    } catch (const std::exception& e) {
        return error_response(500, "Internal", e.what());
    }
}

HttpResponse Service::upload_dataset(const HttpRequest& request)
{
    if (request.body.size() > config_.max_body_bytes) {
        return error_response(413, "PayloadTooLarge",
                              "body of " + std::to_string(request.body.size()) + " bytes exceeds the limit of " +
                                  std::to_string(config_.max_body_bytes));
    }
    const auto format = query_value(request, "format");
    const bool csv = (format && *format == "csv") || request.content_type.find("csv") != std::string::npos;
    const CoordinateMode mode = truthy(query_value(request, "assume_planar")) ? CoordinateMode::Planar
                                                                                 : CoordinateMode::Auto;
    Dataset parsed;
    try {
        if (csv) {
            parsed = parse_point_csv(request.body, query_value(request, "x_col").value_or("x"),
                                     query_value(request, "y_col").value_or("y"), mode);
        } else {
            parsed = parse_geojson(request.body, mode);
        }
    } catch (const Error& e) {
        return error_response(400, to_string(e.kind()), e.what());
    }

    auto dataset = std::make_shared<const Dataset>(std::move(parsed));
    const std::string id = "ds-" + std::to_string(next_id_++);
    datasets_.put(id, dataset);
    return json_response(201, Json{{"dataset_id", id},
                                   {"n", dataset->size()},
                                   {"geometry_kind", to_string(dataset->geometry_kind)},
                                   {"projected", dataset->projected},
                                   {"schema", schema_to_json(dataset->schema)}});
}

HttpResponse Service::dataset_info(const std::string& id)
{
    const auto dataset = datasets_.get(id);
    if (!dataset) return error_response(404, "NotFound", "unknown dataset '" + id + "'");
    return json_response(200, Json{{"dataset_id", id},
                                   {"n", dataset->size()},
                                   {"geometry_kind", to_string(dataset->geometry_kind)},
                                   {"projected", dataset->projected}});
}

HttpResponse Service::list_variables(const std::string& id)
{
    const auto dataset = datasets_.get(id);
    if (!dataset) return error_response(404, "NotFound", "unknown dataset '" + id + "'");
    return json_response(200, schema_to_json(dataset->schema));
}

HttpResponse Service::run_analysis(const std::string& body)
{
    Json request;
    try {
        request = Json::parse(body);
    } catch (const Json::exception& e) {
        return error_response(400, "MalformedInput", std::string("invalid JSON: ") + e.what());
    }
    if (!request.is_object() || !request.contains("dataset_id") || !request["dataset_id"].is_string()) {
        return error_response(422, "InvalidSpec", "field 'dataset_id' is required");
    }
    const std::string dataset_id = request["dataset_id"].get<std::string>();
    auto dataset = datasets_.get(dataset_id);
    if (!dataset) return error_response(404, "NotFound", "unknown dataset '" + dataset_id + "'");

    const AnalysisSpec spec = spec_from_json(request);
    for (const auto& name : spec.variable_set()) dataset->variable_index(name);

    NamePair displayed{spec.var_a, spec.var_b};
    if (request.contains("displayed_pair")) {
        const auto& dp = request["displayed_pair"];
        if (dp.is_string()) {
            displayed = parse_pair(dp.get<std::string>());
        } else if (dp.is_array() && dp.size() == 2 && dp[0].is_string() && dp[1].is_string()) {
            displayed = {dp[0].get<std::string>(), dp[1].get<std::string>()};
        } else {
            return error_response(422, "InvalidSpec", "displayed_pair must be \"a,b\" or [a, b]");
        }
    }

    ComputeOptions options;
    options.threads = config_.threads;
    options.deadline = std::chrono::steady_clock::now() + config_.timeout;
    ++engine_invocations_;
    auto stored = std::make_shared<StoredAnalysis>();
    stored->dataset = dataset;
    stored->spec = spec;
    stored->outcome = gwpcor::run_analysis(*dataset, spec, options);
    stored->displayed = displayed;
    const auto summary = summarize(stored->outcome, displayed);

    const std::string id = "an-" + std::to_string(next_id_++);
    analyses_.put(id, stored);
    Json summary_json = summary_to_json(summary, spec);
    summary_json["analysis_id"] = id;
    return json_response(200, Json{{"analysis_id", id}, {"summary", std::move(summary_json)}});
}

std::shared_ptr<const StoredAnalysis> Service::find_analysis(const std::string& id)
{
    return analyses_.get(id);
}

NamePair Service::displayed_pair(const StoredAnalysis& analysis, const std::optional<std::string>& pair) const
{
    if (!pair) return analysis.displayed;
    return parse_pair(*pair);
}

HttpResponse Service::get_result(const std::string& id, const std::optional<std::string>& pair)
{
    const auto analysis = find_analysis(id);
    if (!analysis) return error_response(404, "NotFound", "unknown analysis '" + id + "'");
    const auto shown = displayed_pair(*analysis, pair);
    return {200, "application/geo+json",
            serialize_result(*analysis->dataset, analysis->outcome.surface, shown.first, shown.second,
                             analysis->outcome.kept)};
}

HttpResponse Service::get_scatter(const std::string& id, const std::optional<std::string>& pair)
{
    const auto analysis = find_analysis(id);
    if (!analysis) return error_response(404, "NotFound", "unknown analysis '" + id + "'");
    const auto shown = displayed_pair(*analysis, pair);
    return json_response(200, scatter_records(*analysis->dataset, analysis->outcome, shown));
}

HttpResponse Service::get_config() const
{
    return json_response(200, Json{{"tiles_url", config_.tiles_url}});
}

} // namespace gwpcor
