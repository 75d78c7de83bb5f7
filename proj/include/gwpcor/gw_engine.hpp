#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "gwpcor/error.hpp"
#include "gwpcor/spatial_weights.hpp"

namespace gwpcor {

enum class Mode { Correlation, PartialCorrelation };
enum class Method { Pearson, Spearman };

std::string_view to_string(Mode mode);
std::string_view to_string(Method method);
Mode parse_mode(std::string_view name);     // "correlation"/"corr", "partial_correlation"/"pcorr"
Method parse_method(std::string_view name); // "pearson", "spearman"

/// Complete (no missing cells) numeric table stored column by column.
class DataMatrix {
public:
    DataMatrix(std::vector<std::string> names, std::vector<std::vector<double>> columns);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return columns_.size(); }
    const std::vector<std::string>& names() const noexcept { return names_; }
    std::span<const double> column(std::size_t c) const { return columns_.at(c); }
    std::optional<std::size_t> index_of(std::string_view name) const;

    /// Columns in the given order; throws SpecMismatch for unknown names.
    DataMatrix select(std::span<const std::string> names) const;

private:
    std::vector<std::string> names_;
    std::vector<std::vector<double>> columns_;
    std::size_t rows_ = 0;
};

struct AnalysisSpec {
    Mode mode = Mode::Correlation;
    Method method = Method::Pearson;
    std::string var_a;
    std::string var_b;
    std::vector<std::string> controls;
    KernelKind kernel = KernelKind::Bisquare;
    BandwidthSpec bandwidth{0.25};

    /// Throws InvalidSpec when the pair repeats a variable, a control overlaps the
    /// pair or repeats, controls are given for plain correlation, or a partial
    /// correlation has no controls.
    void validate() const;

    /// {var_a, var_b} followed by the controls, in request order.
    std::vector<std::string> variable_set() const;
};

/// Unordered pair of positions in a surface's variable set, first < second.
struct VariablePair {
    std::size_t first = 0;
    std::size_t second = 0;
    bool operator==(const VariablePair&) const = default;
};

/// All pairs of an m-variable set in lexicographic order: (0,1), (0,2), ..., (m-2,m-1).
std::vector<VariablePair> all_pairs(std::size_t m);

/// Per-location output. Invalid entries hold NaN in both coefficient and p-value.
struct LocalResult {
    std::size_t location_index = 0;
    std::vector<double> coefficients;
    std::vector<double> p_values;
    std::vector<std::uint8_t> valid;
    double effective_n = 0.0;
    double bandwidth = 0.0;
    bool pseudo_inverse = false;
};

struct GwSurface {
    std::vector<LocalResult> per_location;
    AnalysisSpec spec;
    std::vector<std::string> variable_set;
    std::vector<VariablePair> pairs;
    /// Count of coefficients that left [-1, 1] by more than the clamp tolerance.
    std::size_t clamp_events = 0;

    /// Index into `pairs` for two variable names in either order.
    std::size_t pair_index(std::string_view a, std::string_view b) const;
};

struct SignificanceMask {
    double alpha = 0.0;
    std::vector<std::uint8_t> significant;
};

/// Relative threshold under which a local variance counts as zero.
inline constexpr double kVarianceTolerance = 1e-14;
/// Excursions past +-1 up to this size are rounding noise; larger ones are counted.
inline constexpr double kClampTolerance = 1e-8;

/// 1-based ranks, ties share the mean of their rank range.
std::vector<double> rank_transform(std::span<const double> x);

/// Weighted covariance about weighted means, weights normalised to sum to one.
Eigen::MatrixXd weighted_covariance(const DataMatrix& data, std::span<const double> weights);

/// S_ab / sqrt(S_aa S_bb); nullopt when either variance is degenerate.
std::optional<double> correlation_from_cov(const Eigen::MatrixXd& cov, std::size_t a, std::size_t b,
                                           std::size_t* clamp_events = nullptr);

/// Moore-Penrose inverse of a symmetric matrix through its eigendecomposition,
/// dropping eigenvalues with |lambda| <= m * |lambda|_max * eps.
Eigen::MatrixXd moore_penrose_pinv(const Eigen::MatrixXd& a);

struct PartialCorrelationMatrix {
    /// Unit diagonal; NaN marks invalid entries.
    Eigen::MatrixXd coefficients;
    bool pseudo_inverse = false;

    std::optional<double> at(std::size_t a, std::size_t b) const;
};

/// Partial correlations of every pair given all remaining variables, from the
/// precision matrix: -C_ab / sqrt(C_aa C_bb). C is the Cholesky inverse when
/// the matrix is numerically positive definite, otherwise the pseudo-inverse.
PartialCorrelationMatrix partial_correlation_from_cov(const Eigen::MatrixXd& cov,
                                                      std::size_t* clamp_events = nullptr);

/// Kish effective sample size (sum w)^2 / sum w^2.
double effective_sample_size(std::span<const double> weights);

/// Two-sided p-value of H0: rho = 0 with df = n_eff - 2 - controls.
std::optional<double> local_p_value(double rho, double effective_n, std::size_t controls);
std::optional<double> local_p_value(double rho, std::span<const double> weights, std::size_t controls);

struct ComputeOptions {
    /// Worker count; 0 leaves the choice to OpenMP.
    int threads = 0;
    std::optional<std::chrono::steady_clock::time_point> deadline;
};

/// Full surface over every location, OpenMP-parallel across locations.
/// Output is bit-identical for any thread count.
GwSurface compute_surface(const DataMatrix& data, std::span<const Coord> coords, const AnalysisSpec& spec,
                          const ComputeOptions& options = {});

/// Single-threaded reference loop over the same per-location kernel.
GwSurface compute_surface_serial(const DataMatrix& data, std::span<const Coord> coords,
                                 const AnalysisSpec& spec);

/// significant[i] = valid and p <= alpha; alpha must be 0.01 or 0.05.
SignificanceMask apply_significance_mask(const GwSurface& surface, std::string_view a, std::string_view b,
                                         double alpha);

} // namespace gwpcor
