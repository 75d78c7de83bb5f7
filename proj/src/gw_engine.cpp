#include "gwpcor/gw_engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <boost/math/distributions/students_t.hpp>

namespace gwpcor {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double clamp_unit(double r, std::size_t* clamp_events)
{
    if (r > 1.0 || r < -1.0) {
        if (clamp_events != nullptr && std::abs(r) - 1.0 > kClampTolerance) ++*clamp_events;
        return r > 0.0 ? 1.0 : -1.0;
    }
    return r;
}

} // namespace

std::string_view to_string(Mode mode)
{
    return mode == Mode::Correlation ? "correlation" : "partial_correlation";
}

std::string_view to_string(Method method)
{
    return method == Method::Pearson ? "pearson" : "spearman";
}

Mode parse_mode(std::string_view name)
{
    if (name == "correlation" || name == "corr") return Mode::Correlation;
    if (name == "partial_correlation" || name == "pcorr" || name == "partial") return Mode::PartialCorrelation;
    throw Error(ErrorKind::InvalidSpec, "unknown mode '" + std::string(name) + "'");
}

Method parse_method(std::string_view name)
{
    if (name == "pearson") return Method::Pearson;
    if (name == "spearman") return Method::Spearman;
    throw Error(ErrorKind::InvalidSpec, "unknown method '" + std::string(name) + "'");
}

DataMatrix::DataMatrix(std::vector<std::string> names, std::vector<std::vector<double>> columns)
    : names_(std::move(names)), columns_(std::move(columns))
{
    if (names_.size() != columns_.size()) {
        throw Error(ErrorKind::InvalidSpec, "column/name count mismatch");
    }
    rows_ = columns_.empty() ? 0 : columns_.front().size();
    for (const auto& c : columns_) {
        if (c.size() != rows_) throw Error(ErrorKind::InvalidSpec, "ragged data matrix");
        for (double v : c) {
            if (!std::isfinite(v)) throw Error(ErrorKind::InvalidSpec, "data matrix holds a non-finite value");
        }
    }
}

std::optional<std::size_t> DataMatrix::index_of(std::string_view name) const
{
    auto it = std::find(names_.begin(), names_.end(), name);
    if (it == names_.end()) return std::nullopt;
    return static_cast<std::size_t>(it - names_.begin());
}

DataMatrix DataMatrix::select(std::span<const std::string> names) const
{
    std::vector<std::vector<double>> cols;
    cols.reserve(names.size());
    for (const auto& name : names) {
        auto idx = index_of(name);
        if (!idx) throw Error(ErrorKind::SpecMismatch, "variable '" + name + "' not in dataset");
        cols.push_back(columns_[*idx]);
    }
    return DataMatrix({names.begin(), names.end()}, std::move(cols));
}

void AnalysisSpec::validate() const
{
    if (var_a.empty() || var_b.empty()) throw Error(ErrorKind::InvalidSpec, "both pair variables are required");
    if (var_a == var_b) throw Error(ErrorKind::InvalidSpec, "pair variables must differ");
    if (mode == Mode::Correlation && !controls.empty()) {
        throw Error(ErrorKind::InvalidSpec, "controls are only allowed for partial correlation");
    }
    if (mode == Mode::PartialCorrelation && controls.empty()) {
        throw Error(ErrorKind::InvalidSpec, "partial correlation needs at least one control");
    }
    for (std::size_t c = 0; c < controls.size(); ++c) {
        if (controls[c] == var_a || controls[c] == var_b) {
            throw Error(ErrorKind::InvalidSpec, "control '" + controls[c] + "' overlaps the pair");
        }
        if (std::find(controls.begin(), controls.begin() + static_cast<std::ptrdiff_t>(c), controls[c]) !=
            controls.begin() + static_cast<std::ptrdiff_t>(c)) {
            throw Error(ErrorKind::InvalidSpec, "control '" + controls[c] + "' listed twice");
        }
    }
}

std::vector<std::string> AnalysisSpec::variable_set() const
{
    std::vector<std::string> out{var_a, var_b};
    out.insert(out.end(), controls.begin(), controls.end());
    return out;
}

std::vector<VariablePair> all_pairs(std::size_t m)
{
    std::vector<VariablePair> out;
    for (std::size_t a = 0; a + 1 < m; ++a) {
        for (std::size_t b = a + 1; b < m; ++b) out.push_back({a, b});
    }
    return out;
}

std::size_t GwSurface::pair_index(std::string_view a, std::string_view b) const
{
    auto pos = [&](std::string_view name) -> std::optional<std::size_t> {
        auto it = std::find(variable_set.begin(), variable_set.end(), name);
        if (it == variable_set.end()) return std::nullopt;
        return static_cast<std::size_t>(it - variable_set.begin());
    };
    auto pa = pos(a);
    auto pb = pos(b);
    if (!pa || !pb || *pa == *pb) {
        throw Error(ErrorKind::PairNotInSurface,
                    "pair (" + std::string(a) + ", " + std::string(b) + ") is not in the analysis variable set");
    }
    const VariablePair key{std::min(*pa, *pb), std::max(*pa, *pb)};
    auto it = std::find(pairs.begin(), pairs.end(), key);
    if (it == pairs.end()) throw Error(ErrorKind::PairNotInSurface, "pair not computed");
    return static_cast<std::size_t>(it - pairs.begin());
}

std::vector<double> rank_transform(std::span<const double> x)
{
    const std::size_t n = x.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t l, std::size_t r) { return x[l] < x[r]; });

    std::vector<double> ranks(n);
    std::size_t start = 0;
    while (start < n) {
        std::size_t stop = start + 1;
        while (stop < n && x[order[stop]] == x[order[start]]) ++stop;
        // Positions start..stop-1 hold ranks start+1..stop; ties take their mean.
        const double rank = 0.5 * static_cast<double>(start + 1 + stop);
        for (std::size_t p = start; p < stop; ++p) ranks[order[p]] = rank;
        start = stop;
    }
    return ranks;
}

Eigen::MatrixXd weighted_covariance(const DataMatrix& data, std::span<const double> weights)
{
    const std::size_t n = data.rows();
    const std::size_t m = data.cols();
    if (weights.size() != n) throw Error(ErrorKind::InvalidSpec, "weight vector length differs from row count");

    const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
    if (!(total > 0.0)) throw Error(ErrorKind::ZeroTotalWeight, "weights sum to zero");

    std::vector<double> mean(m, 0.0);
    for (std::size_t c = 0; c < m; ++c) {
        const auto col = data.column(c);
        double acc = 0.0;
        for (std::size_t j = 0; j < n; ++j) acc += weights[j] * col[j];
        mean[c] = acc / total;
    }

    Eigen::MatrixXd cov(m, m);
    for (std::size_t a = 0; a < m; ++a) {
        const auto ca = data.column(a);
        for (std::size_t b = a; b < m; ++b) {
            const auto cb = data.column(b);
            double acc = 0.0;
            for (std::size_t j = 0; j < n; ++j) acc += weights[j] * (ca[j] - mean[a]) * (cb[j] - mean[b]);
            cov(a, b) = cov(b, a) = acc / total;
        }
    }
    return cov;
}

std::optional<double> correlation_from_cov(const Eigen::MatrixXd& cov, std::size_t a, std::size_t b,
                                           std::size_t* clamp_events)
{
    const double largest = cov.diagonal().maxCoeff();
    const double tau = kVarianceTolerance * largest;
    const double saa = cov(a, a);
    const double sbb = cov(b, b);
    if (!(largest > 0.0) || saa <= tau || sbb <= tau) return std::nullopt;
    if (a == b) return 1.0;
    return clamp_unit(cov(a, b) / std::sqrt(saa * sbb), clamp_events);
}

Eigen::MatrixXd moore_penrose_pinv(const Eigen::MatrixXd& a)
{
    const Eigen::Index m = a.rows();
    if (m == 0) return a;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(a);
    const Eigen::VectorXd& lambda = eig.eigenvalues();
    const double tol = static_cast<double>(m) * lambda.cwiseAbs().maxCoeff() * std::numeric_limits<double>::epsilon();

    Eigen::VectorXd inv(m);
    for (Eigen::Index k = 0; k < m; ++k) inv(k) = std::abs(lambda(k)) > tol ? 1.0 / lambda(k) : 0.0;
    const Eigen::MatrixXd& q = eig.eigenvectors();
    Eigen::MatrixXd out = q * inv.asDiagonal() * q.transpose();
    // Symmetrise away the rounding asymmetry of the triple product.
    return 0.5 * (out + out.transpose());
}

std::optional<double> PartialCorrelationMatrix::at(std::size_t a, std::size_t b) const
{
    const double v = coefficients(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
    if (std::isnan(v)) return std::nullopt;
    return v;
}

PartialCorrelationMatrix partial_correlation_from_cov(const Eigen::MatrixXd& cov, std::size_t* clamp_events)
{
    const Eigen::Index m = cov.rows();
    PartialCorrelationMatrix out;
    out.coefficients = Eigen::MatrixXd::Constant(m, m, kNaN);

    if (m == 2) {
        const auto r = correlation_from_cov(cov, 0, 1, clamp_events);
        out.coefficients(0, 0) = out.coefficients(1, 1) = 1.0;
        out.coefficients(0, 1) = out.coefficients(1, 0) = r.value_or(kNaN);
        if (!r) out.coefficients(0, 0) = out.coefficients(1, 1) = kNaN;
        return out;
    }

    // Cholesky success alone accepts matrices whose smallest pivot is rounding
    // noise; also require rcond above the pseudo-inverse cut-off.
    const double eps = std::numeric_limits<double>::epsilon();
    Eigen::MatrixXd precision;
    Eigen::LLT<Eigen::MatrixXd> llt(cov);
    if (llt.info() == Eigen::Success && llt.rcond() > static_cast<double>(m) * eps) {
        precision = llt.solve(Eigen::MatrixXd::Identity(m, m));
    } else {
        precision = moore_penrose_pinv(cov);
        out.pseudo_inverse = true;
    }

    const double largest = precision.diagonal().cwiseAbs().maxCoeff();
    const double tol = kVarianceTolerance * largest;
    for (Eigen::Index a = 0; a < m; ++a) {
        const double caa = precision(a, a);
        if (!(largest > 0.0) || caa <= tol) continue;
        out.coefficients(a, a) = 1.0;
        for (Eigen::Index b = a + 1; b < m; ++b) {
            const double cbb = precision(b, b);
            if (cbb <= tol) continue;
            const double r = clamp_unit(-precision(a, b) / std::sqrt(caa * cbb), clamp_events);
            out.coefficients(a, b) = out.coefficients(b, a) = r;
        }
    }
    return out;
}

double effective_sample_size(std::span<const double> weights)
{
    double sum = 0.0;
    double sum_sq = 0.0;
    for (double w : weights) {
        sum += w;
        sum_sq += w * w;
    }
    if (!(sum_sq > 0.0)) return 0.0;
    return sum * sum / sum_sq;
}

std::optional<double> local_p_value(double rho, double effective_n, std::size_t controls)
{
    const double df = effective_n - 2.0 - static_cast<double>(controls);
    if (!(df >= 1.0) || std::isnan(rho)) return std::nullopt;
    const double r = std::abs(rho);
    if (r >= 1.0) return 0.0;
    if (r == 0.0) return 1.0;
    const double t = r * std::sqrt(df / (1.0 - r * r));
    const boost::math::students_t dist(df);
    const double p = 2.0 * boost::math::cdf(boost::math::complement(dist, t));
    return std::clamp(p, 0.0, 1.0);
}

std::optional<double> local_p_value(double rho, std::span<const double> weights, std::size_t controls)
{
    return local_p_value(rho, effective_sample_size(weights), controls);
}

SignificanceMask apply_significance_mask(const GwSurface& surface, std::string_view a, std::string_view b,
                                         double alpha)
{
    if (alpha != 0.01 && alpha != 0.05) {
        throw Error(ErrorKind::InvalidSpec, "alpha must be 0.01 or 0.05");
    }
    const std::size_t pair = surface.pair_index(a, b);
    SignificanceMask mask;
    mask.alpha = alpha;
    mask.significant.reserve(surface.per_location.size());
    for (const auto& local : surface.per_location) {
        const bool sig = local.valid[pair] != 0 && local.p_values[pair] <= alpha;
        mask.significant.push_back(sig ? 1 : 0);
    }
    return mask;
}

} // namespace gwpcor
