#include "gwpcor/analysis.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>

namespace gwpcor {

AnalysisOutcome run_analysis(const Dataset& dataset, const AnalysisSpec& spec, const ComputeOptions& options)
{
    spec.validate();
    const auto names = spec.variable_set();
    auto complete = listwise_complete(dataset, names);

    AnalysisOutcome out;
    const auto start = std::chrono::steady_clock::now();
    out.surface = compute_surface(complete.data, complete.coords, spec, options);
    out.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    out.n_dropped = dataset.size() - complete.kept.size();
    out.kept = std::move(complete.kept);
    return out;
}

AnalysisSummary summarize(const AnalysisOutcome& outcome, const NamePair& pair)
{
    const auto& surface = outcome.surface;
    const std::size_t k = surface.pair_index(pair.first, pair.second);

    AnalysisSummary s;
    s.pair = pair;
    s.n_used = surface.per_location.size();
    s.n_dropped = outcome.n_dropped;
    s.clamp_events = surface.clamp_events;
    s.wall_ms = outcome.wall_ms;
    s.coef_min = std::numeric_limits<double>::infinity();
    s.coef_max = -std::numeric_limits<double>::infinity();
    double sum = 0.0;
    for (const auto& local : surface.per_location) {
        if (local.pseudo_inverse) ++s.pseudo_inverse_locations;
        if (local.valid[k] == 0) continue;
        const double r = local.coefficients[k];
        const double p = local.p_values[k];
        ++s.n_valid;
        sum += r;
        s.coef_min = std::min(s.coef_min, r);
        s.coef_max = std::max(s.coef_max, r);
        if (p <= 0.01) ++s.significant_001;
        if (p <= 0.05) ++s.significant_005;
    }
    if (s.n_valid == 0) {
        s.coef_min = s.coef_max = s.coef_mean = std::numeric_limits<double>::quiet_NaN();
    } else {
        s.coef_mean = sum / static_cast<double>(s.n_valid);
    }
    return s;
}

Json spec_to_json(const AnalysisSpec& spec)
{
    return Json{{"mode", to_string(spec.mode)},
                {"method", to_string(spec.method)},
                {"var_a", spec.var_a},
                {"var_b", spec.var_b},
                {"controls", spec.controls},
                {"kernel", to_string(spec.kernel)},
                {"bandwidth_proportion", spec.bandwidth.proportion()}};
}

AnalysisSpec spec_from_json(const Json& body)
{
    if (!body.is_object()) throw Error(ErrorKind::InvalidSpec, "analysis request must be a JSON object");
    auto text = [&](const char* key, const char* fallback) -> std::string {
        if (!body.contains(key)) {
            if (fallback != nullptr) return fallback;
            throw Error(ErrorKind::InvalidSpec, std::string("missing field '") + key + "'");
        }
        if (!body[key].is_string()) throw Error(ErrorKind::InvalidSpec, std::string("field '") + key + "' must be a string");
        return body[key].get<std::string>();
    };

    AnalysisSpec spec;
    spec.mode = parse_mode(text("mode", "correlation"));
    spec.method = parse_method(text("method", "pearson"));
    spec.var_a = text("var_a", nullptr);
    spec.var_b = text("var_b", nullptr);
    spec.kernel = parse_kernel(text("kernel", "bisquare"));
    if (body.contains("controls")) {
        const auto& controls = body["controls"];
        if (!controls.is_array()) throw Error(ErrorKind::InvalidSpec, "field 'controls' must be an array");
        for (const auto& c : controls) {
            if (!c.is_string()) throw Error(ErrorKind::InvalidSpec, "controls must be variable names");
            spec.controls.push_back(c.get<std::string>());
        }
    }
    if (!body.contains("bandwidth_proportion") || !body["bandwidth_proportion"].is_number()) {
        throw Error(ErrorKind::InvalidSpec, "field 'bandwidth_proportion' must be a number");
    }
    spec.bandwidth = BandwidthSpec(body["bandwidth_proportion"].get<double>());
    spec.validate();
    return spec;
}

Json summary_to_json(const AnalysisSummary& s, const AnalysisSpec& spec)
{
    auto num = [](double v) { return std::isnan(v) ? Json(nullptr) : Json(v); };
    return Json{{"spec", spec_to_json(spec)},
                {"pair", Json::array({s.pair.first, s.pair.second})},
                {"n_used", s.n_used},
                {"n_dropped", s.n_dropped},
                {"n_valid", s.n_valid},
                {"coef_min", num(s.coef_min)},
                {"coef_max", num(s.coef_max)},
                {"coef_mean", num(s.coef_mean)},
                {"significant_001", s.significant_001},
                {"significant_005", s.significant_005},
                {"clamp_events", s.clamp_events},
                {"pseudo_inverse_locations", s.pseudo_inverse_locations},
                {"wall_ms", s.wall_ms}};
}

std::string summary_to_text(const AnalysisSummary& s, const AnalysisSpec& spec)
{
    std::ostringstream out;
    out << to_string(spec.mode) << ' ' << to_string(spec.method) << ' ' << to_string(spec.kernel)
        << " bandwidth=" << spec.bandwidth.proportion() << " pair=" << s.pair.first << ',' << s.pair.second;
    if (!spec.controls.empty()) {
        out << " controls=";
        for (std::size_t c = 0; c < spec.controls.size(); ++c) out << (c ? "," : "") << spec.controls[c];
    }
    out << '\n'
        << "n_used=" << s.n_used << " n_dropped=" << s.n_dropped << " n_valid=" << s.n_valid << '\n'
        << "coef min=" << s.coef_min << " max=" << s.coef_max << " mean=" << s.coef_mean << '\n'
        << "significant p<=0.01: " << s.significant_001 << "  p<=0.05: " << s.significant_005 << '\n'
        << "clamp_events=" << s.clamp_events << " pseudo_inverse_locations=" << s.pseudo_inverse_locations
        << " wall_ms=" << s.wall_ms << '\n';
    return out.str();
}

Json scatter_records(const Dataset& dataset, const AnalysisOutcome& outcome, const NamePair& pair)
{
    const auto& surface = outcome.surface;
    const std::size_t k = surface.pair_index(pair.first, pair.second);
    const auto& a = dataset.columns[dataset.variable_index(pair.first)];
    const auto& b = dataset.columns[dataset.variable_index(pair.second)];

    Json records = Json::array();
    for (std::size_t pos = 0; pos < outcome.kept.size(); ++pos) {
        const std::size_t row = outcome.kept[pos];
        const auto& local = surface.per_location[pos];
        const bool valid = local.valid[k] != 0;
        const double p = local.p_values[k];
        records.push_back(Json{{"index", row},
                               {"value_a", a[row]},
                               {"value_b", b[row]},
                               {"coef", valid ? Json(local.coefficients[k]) : Json(nullptr)},
                               {"pval", valid ? Json(p) : Json(nullptr)},
                               {"significant_at", Json{{"0.01", valid && p <= 0.01}, {"0.05", valid && p <= 0.05}}}});
    }
    return records;
}

NamePair parse_pair(std::string_view text)
{
    const auto comma = text.find(',');
    if (comma == std::string_view::npos || comma == 0 || comma + 1 == text.size() ||
        text.find(',', comma + 1) != std::string_view::npos) {
        throw Error(ErrorKind::InvalidSpec, "pair must be two names separated by one comma");
    }
    return {std::string(text.substr(0, comma)), std::string(text.substr(comma + 1))};
}

} // namespace gwpcor
