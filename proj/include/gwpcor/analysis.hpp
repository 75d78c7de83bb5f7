#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gwpcor/geodata.hpp"
#include "gwpcor/gw_engine.hpp"

namespace gwpcor {

using NamePair = std::pair<std::string, std::string>;

/// A surface plus the bookkeeping needed to map it back onto its dataset.
struct AnalysisOutcome {
    GwSurface surface;
    std::vector<std::size_t> kept;
    std::size_t n_dropped = 0;
    double wall_ms = 0.0;
};

/// Listwise completion over the spec's variable set, then compute_surface.
AnalysisOutcome run_analysis(const Dataset& dataset, const AnalysisSpec& spec, const ComputeOptions& options = {});

struct AnalysisSummary {
    NamePair pair;
    std::size_t n_used = 0;
    std::size_t n_dropped = 0;
    std::size_t n_valid = 0;
    double coef_min = 0.0;
    double coef_max = 0.0;
    double coef_mean = 0.0;
    std::size_t significant_001 = 0;
    std::size_t significant_005 = 0;
    std::size_t clamp_events = 0;
    std::size_t pseudo_inverse_locations = 0;
    double wall_ms = 0.0;
};

AnalysisSummary summarize(const AnalysisOutcome& outcome, const NamePair& pair);

Json spec_to_json(const AnalysisSpec& spec);
/// Request body fields: mode, method, var_a, var_b, controls, kernel,
/// bandwidth_proportion. Throws InvalidSpec on missing or ill-typed fields.
AnalysisSpec spec_from_json(const Json& body);

Json summary_to_json(const AnalysisSummary& summary, const AnalysisSpec& spec);
std::string summary_to_text(const AnalysisSummary& summary, const AnalysisSpec& spec);

/// One record per kept observation, indexed by original feature position.
Json scatter_records(const Dataset& dataset, const AnalysisOutcome& outcome, const NamePair& pair);

/// Parses "a,b" into a pair of names.
NamePair parse_pair(std::string_view text);

} // namespace gwpcor
