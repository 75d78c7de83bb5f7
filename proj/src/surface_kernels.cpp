#include "gwpcor/gw_engine.hpp"

#include <atomic>
#include <exception>
#include <limits>
#include <mutex>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace gwpcor {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

/// Read-only inputs shared by every location.
struct SurfaceProblem {
    std::vector<std::vector<double>> columns; // analysis variables, ranked for Spearman
    std::span<const Coord> coords;
    AnalysisSpec spec;
    std::vector<VariablePair> pairs;
    std::size_t neighbours = 0;
    std::size_t controls = 0;
};

/// Per-worker scratch, O(n + m^2).
struct Workspace {
    std::vector<double> distance;
    std::vector<double> scratch;
    std::vector<double> weight;
    std::vector<std::size_t> support;
    std::vector<double> mean;
    Eigen::MatrixXd cov;

    explicit Workspace(std::size_t n, std::size_t m)
        : distance(n), scratch(n), weight(n), mean(m), cov(m, m)
    {
        support.reserve(n);
    }
};

SurfaceProblem make_problem(const DataMatrix& data, std::span<const Coord> coords, const AnalysisSpec& spec)
{
    spec.validate();
    if (coords.size() != data.rows()) {
        throw Error(ErrorKind::SpecMismatch, "coordinate count differs from row count");
    }
    if (data.rows() < 3) throw Error(ErrorKind::TooFewComplete, "at least three observations are required");

    SurfaceProblem p;
    p.spec = spec;
    p.coords = coords;
    const auto names = spec.variable_set();
    const DataMatrix selected = data.select(names);
    p.columns.reserve(names.size());
    for (std::size_t c = 0; c < selected.cols(); ++c) {
        const auto col = selected.column(c);
        if (spec.method == Method::Spearman) {
            p.columns.push_back(rank_transform(col));
        } else {
            p.columns.emplace_back(col.begin(), col.end());
        }
    }
    p.pairs = all_pairs(names.size());
    p.neighbours = spec.bandwidth.neighbour_count(data.rows());
    p.controls = spec.mode == Mode::PartialCorrelation ? names.size() - 2 : 0;
    return p;
}

GwSurface empty_surface(const SurfaceProblem& p, std::size_t n)
{
    GwSurface s;
    s.spec = p.spec;
    s.variable_set = p.spec.variable_set();
    s.pairs = p.pairs;
    s.per_location.resize(n);
    return s;
}

/// The whole per-location computation. Summation order depends only on j, so
/// the result is independent of which worker runs it.
void compute_location(std::size_t i, const SurfaceProblem& p, Workspace& ws, LocalResult& out,
                      std::size_t& clamp_events)
{
    const std::size_t n = p.coords.size();
    const std::size_t m = p.columns.size();
    const Coord focal = p.coords[i];

    for (std::size_t j = 0; j < n; ++j) ws.distance[j] = pairwise_distance(focal, p.coords[j]);
    std::copy(ws.distance.begin(), ws.distance.end(), ws.scratch.begin());
    const double b = detail::bandwidth_from_distances(ws.scratch, p.neighbours);

    double sum_w = 0.0;
    double sum_w2 = 0.0;
    ws.support.clear();
    for (std::size_t j = 0; j < n; ++j) {
        const double w = detail::kernel_weight_unchecked(p.spec.kernel, ws.distance[j], b);
        ws.weight[j] = w;
        if (w != 0.0) {
            ws.support.push_back(j);
            sum_w += w;
            sum_w2 += w * w;
        }
    }
    if (!(sum_w > 0.0)) throw Error(ErrorKind::ZeroTotalWeight, "empty kernel window");

    for (std::size_t c = 0; c < m; ++c) {
        const double* col = p.columns[c].data();
        double acc = 0.0;
        for (std::size_t j : ws.support) acc += ws.weight[j] * col[j];
        ws.mean[c] = acc / sum_w;
    }
    for (std::size_t a = 0; a < m; ++a) {
        const double* ca = p.columns[a].data();
        const double ma = ws.mean[a];
        for (std::size_t c = a; c < m; ++c) {
            const double* cb = p.columns[c].data();
            const double mb = ws.mean[c];
            double acc = 0.0;
            for (std::size_t j : ws.support) acc += ws.weight[j] * (ca[j] - ma) * (cb[j] - mb);
            ws.cov(a, c) = ws.cov(c, a) = acc / sum_w;
        }
    }

    out.location_index = i;
    out.bandwidth = b;
    out.effective_n = sum_w * sum_w / sum_w2;
    out.coefficients.assign(p.pairs.size(), kNaN);
    out.p_values.assign(p.pairs.size(), kNaN);
    out.valid.assign(p.pairs.size(), 0);
    out.pseudo_inverse = false;

    auto store = [&](std::size_t k, std::optional<double> r) {
        if (!r) return;
        const auto pval = local_p_value(*r, out.effective_n, p.controls);
        if (!pval) return;
        out.coefficients[k] = *r;
        out.p_values[k] = *pval;
        out.valid[k] = 1;
    };

    if (p.spec.mode == Mode::Correlation) {
        store(0, correlation_from_cov(ws.cov, 0, 1, &clamp_events));
    } else {
        const auto pcor = partial_correlation_from_cov(ws.cov, &clamp_events);
        out.pseudo_inverse = pcor.pseudo_inverse;
        for (std::size_t k = 0; k < p.pairs.size(); ++k) store(k, pcor.at(p.pairs[k].first, p.pairs[k].second));
    }
}

} // namespace

GwSurface compute_surface_serial(const DataMatrix& data, std::span<const Coord> coords, const AnalysisSpec& spec)
{
    const SurfaceProblem p = make_problem(data, coords, spec);
    const std::size_t n = coords.size();
    GwSurface surface = empty_surface(p, n);
    Workspace ws(n, p.columns.size());
    for (std::size_t i = 0; i < n; ++i) compute_location(i, p, ws, surface.per_location[i], surface.clamp_events);
    return surface;
}

GwSurface compute_surface(const DataMatrix& data, std::span<const Coord> coords, const AnalysisSpec& spec,
                          const ComputeOptions& options)
{
    const SurfaceProblem p = make_problem(data, coords, spec);
    const std::size_t n = coords.size();
    GwSurface surface = empty_surface(p, n);

    std::atomic<bool> stop{false};
    std::atomic<bool> timed_out{false};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::size_t clamp_events = 0;

#ifdef _OPENMP
    const int threads = options.threads > 0 ? options.threads : omp_get_max_threads();
#pragma omp parallel num_threads(threads) reduction(+ : clamp_events)
#endif
    {
        Workspace ws(n, p.columns.size());
        const auto count = static_cast<std::ptrdiff_t>(n);
#ifdef _OPENMP
#pragma omp for schedule(dynamic, 16)
#endif
        for (std::ptrdiff_t i = 0; i < count; ++i) {
            if (stop.load(std::memory_order_relaxed)) continue;
            if (options.deadline && std::chrono::steady_clock::now() > *options.deadline) {
                timed_out = true;
                stop = true;
                continue;
            }
            try {
                compute_location(static_cast<std::size_t>(i), p, ws, surface.per_location[static_cast<std::size_t>(i)],
                                 clamp_events);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                stop = true;
            }
        }
    }

    if (failure) std::rethrow_exception(failure);
    if (timed_out) throw Error(ErrorKind::Timeout, "surface computation exceeded its deadline");
    surface.clamp_events = clamp_events;
    return surface;
}

} // namespace gwpcor
