// Random-trial property checks shared by the unit tests and the acceptance binary.
#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "gwpcor/gw_engine.hpp"
#include "oracles.hpp"

namespace props {

using namespace gwpcor;

struct Outcome {
    int trials = 0;
    int failures = 0;
    double worst = 0.0;

    void record(bool ok, double deviation = 0.0)
    {
        ++trials;
        if (!ok) ++failures;
        if (std::isfinite(deviation)) worst = std::max(worst, deviation);
    }
    bool passed() const { return trials > 0 && failures == 0; }
};

struct Trial {
    std::vector<Coord> coords;
    oracle::Matrix cols;
    AnalysisSpec spec;
};

inline DataMatrix to_data(const oracle::Matrix& cols)
{
    std::vector<std::string> names;
    for (std::size_t c = 0; c < cols.size(); ++c) names.push_back("c" + std::to_string(c));
    return DataMatrix(names, cols);
}

inline std::vector<Coord> to_coords(const std::vector<oracle::Point>& pts)
{
    std::vector<Coord> out;
    for (const auto& p : pts) out.push_back({p.x, p.y});
    return out;
}

/// Random layout, columns, kernel, method, mode and bandwidth.
inline Trial random_trial(std::mt19937_64& rng)
{
    std::uniform_int_distribution<int> n_dist(20, 60);
    std::uniform_int_distribution<int> m_dist(2, 4);
    std::uniform_int_distribution<int> kernel_dist(0, 4);
    std::uniform_real_distribution<double> bw_dist(0.35, 1.0);
    std::bernoulli_distribution coin(0.5);
    const auto n = static_cast<std::size_t>(n_dist(rng));
    const auto m = static_cast<std::size_t>(m_dist(rng));

    Trial t;
    t.coords = to_coords(oracle::random_points(rng, n));
    t.cols = oracle::random_columns(rng, m, n);
    t.spec.var_a = "c0";
    t.spec.var_b = "c1";
    if (m > 2 && coin(rng)) {
        t.spec.mode = Mode::PartialCorrelation;
        for (std::size_t c = 2; c < m; ++c) t.spec.controls.push_back("c" + std::to_string(c));
    }
    t.spec.method = coin(rng) ? Method::Spearman : Method::Pearson;
    t.spec.kernel = static_cast<KernelKind>(kernel_dist(rng));
    t.spec.bandwidth = BandwidthSpec(bw_dist(rng));
    return t;
}

inline GwSurface run(const Trial& t)
{
    return compute_surface(to_data(t.cols), t.coords, t.spec);
}

/// Largest |sign * a - b| over valid coefficients of one pair; infinity when
/// validity differs anywhere.
inline double coefficient_gap(const GwSurface& a, std::size_t pair_a, const GwSurface& b, std::size_t pair_b,
                              double sign = 1.0, double* p_gap = nullptr)
{
    double worst = 0.0;
    for (std::size_t i = 0; i < a.per_location.size(); ++i) {
        const auto& la = a.per_location[i];
        const auto& lb = b.per_location[i];
        if (la.valid[pair_a] != lb.valid[pair_b]) return std::numeric_limits<double>::infinity();
        if (!la.valid[pair_a]) continue;
        worst = std::max(worst, std::abs(sign * la.coefficients[pair_a] - lb.coefficients[pair_b]));
        if (p_gap) *p_gap = std::max(*p_gap, std::abs(la.p_values[pair_a] - lb.p_values[pair_b]));
    }
    return worst;
}

inline bool bit_identical(const GwSurface& a, const GwSurface& b)
{
    if (a.per_location.size() != b.per_location.size()) return false;
    for (std::size_t i = 0; i < a.per_location.size(); ++i) {
        const auto& la = a.per_location[i];
        const auto& lb = b.per_location[i];
        if (la.valid != lb.valid) return false;
        const auto bytes = la.coefficients.size() * sizeof(double);
        if (lb.coefficients.size() != la.coefficients.size()) return false;
        if (std::memcmp(la.coefficients.data(), lb.coefficients.data(), bytes) != 0) return false;
        if (std::memcmp(la.p_values.data(), lb.p_values.data(), bytes) != 0) return false;
    }
    return true;
}

/// x -> alpha x + beta on one variable: coefficients of pairs containing it
/// flip sign with alpha, everything else is unchanged.
inline Outcome affine_invariance(std::mt19937_64& rng, int trials, double tol = 1e-9)
{
    std::uniform_real_distribution<double> scale(0.1, 10.0);
    std::uniform_real_distribution<double> shift(-100.0, 100.0);
    std::bernoulli_distribution coin(0.5);
    Outcome out;
    for (int k = 0; k < trials; ++k) {
        auto t = random_trial(rng);
        const auto before = run(t);
        const double alpha = coin(rng) ? -scale(rng) : scale(rng);
        const double beta = shift(rng);
        for (auto& v : t.cols[0]) v = alpha * v + beta;
        const auto after = run(t);
        double worst = 0.0, p_worst = 0.0;
        for (std::size_t p = 0; p < before.pairs.size(); ++p) {
            const bool touches = before.pairs[p].first == 0 || before.pairs[p].second == 0;
            const double sign = touches && alpha < 0 ? -1.0 : 1.0;
            worst = std::max(worst, coefficient_gap(before, p, after, p, sign, &p_worst));
        }
        out.record(worst <= tol && p_worst <= 1e-8, worst);
    }
    return out;
}

/// Scaling every weight by c > 0 leaves the local coefficient unchanged.
inline Outcome weight_scale_invariance(std::mt19937_64& rng, int trials, double tol = 1e-12)
{
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::uniform_real_distribution<double> log_scale(-6.0, 6.0);
    Outcome out;
    for (int k = 0; k < trials; ++k) {
        const auto cols = oracle::random_columns(rng, 3, 40);
        const auto data = to_data(cols);
        std::vector<double> w(40), scaled(40);
        const double c = std::pow(10.0, log_scale(rng));
        for (std::size_t j = 0; j < w.size(); ++j) {
            w[j] = u(rng);
            scaled[j] = c * w[j];
        }
        const auto s1 = weighted_covariance(data, w);
        const auto s2 = weighted_covariance(data, scaled);
        double worst = std::abs(*correlation_from_cov(s1, 0, 1) - *correlation_from_cov(s2, 0, 1));
        worst = std::max(worst, std::abs(*partial_correlation_from_cov(s1).at(0, 1) -
                                         *partial_correlation_from_cov(s2).at(0, 1)));
        const double n1 = effective_sample_size(w);
        const double n2 = effective_sample_size(scaled);
        out.record(worst <= tol && std::abs(n1 - n2) <= 1e-12 * n1, worst);
    }
    return out;
}

/// Spearman output is unchanged by strictly increasing transforms of the inputs.
inline Outcome spearman_monotone_invariance(std::mt19937_64& rng, int trials)
{
    Outcome out;
    for (int k = 0; k < trials; ++k) {
        auto t = random_trial(rng);
        t.spec.method = Method::Spearman;
        const auto before = run(t);
        for (auto& v : t.cols[0]) v = std::exp(v / 3.0);
        for (auto& v : t.cols[1]) v = v * v * v + v;
        out.record(bit_identical(before, run(t)));
    }
    return out;
}

/// Spearman equals Pearson on globally rank-transformed columns.
inline Outcome spearman_is_pearson_on_ranks(std::mt19937_64& rng, int trials, double tol = 1e-12)
{
    Outcome out;
    for (int k = 0; k < trials; ++k) {
        auto t = random_trial(rng);
        t.spec.method = Method::Spearman;
        const auto spearman = run(t);
        for (auto& c : t.cols) c = oracle::counting_ranks(c);
        t.spec.method = Method::Pearson;
        const auto pearson = run(t);
        double worst = 0.0;
        for (std::size_t p = 0; p < spearman.pairs.size(); ++p)
            worst = std::max(worst, coefficient_gap(spearman, p, pearson, p));
        out.record(worst <= tol, worst);
    }
    return out;
}

/// Swapping the focal pair gives the same surface.
inline Outcome pair_symmetry(std::mt19937_64& rng, int trials, double tol = 1e-12)
{
    Outcome out;
    for (int k = 0; k < trials; ++k) {
        auto t = random_trial(rng);
        const auto ab = run(t);
        std::swap(t.spec.var_a, t.spec.var_b);
        const auto ba = run(t);
        double p_gap = 0.0;
        const double worst =
            coefficient_gap(ab, ab.pair_index("c0", "c1"), ba, ba.pair_index("c1", "c0"), 1.0, &p_gap);
        out.record(worst <= tol && p_gap <= 1e-10, worst);
    }
    return out;
}

/// Coefficients stay in [-1, 1] and p-values in [0, 1]; invalid cells are NaN.
inline Outcome value_ranges(std::mt19937_64& rng, int trials)
{
    Outcome out;
    for (int k = 0; k < trials; ++k) {
        auto t = random_trial(rng);
        // Near-collinear columns push coefficients toward the bounds.
        if (k % 2 == 0) {
            for (std::size_t j = 0; j < t.cols[0].size(); ++j) t.cols[1][j] = t.cols[0][j] * 3.0 + 1e-9 * t.cols[1][j];
        }
        const auto s = run(t);
        bool ok = true;
        for (const auto& local : s.per_location) {
            for (std::size_t p = 0; p < local.coefficients.size(); ++p) {
                const double r = local.coefficients[p];
                const double pv = local.p_values[p];
                if (local.valid[p]) {
                    ok = ok && r >= -1.0 && r <= 1.0 && pv >= 0.0 && pv <= 1.0;
                } else {
                    ok = ok && std::isnan(r) && std::isnan(pv);
                }
            }
        }
        out.record(ok);
    }
    return out;
}

/// Gram matrix G G^T of an m x rank Gaussian G, entries scaled by `scale`.
/// Square G gives a heavy-tailed condition number.
inline Eigen::MatrixXd random_gram(std::mt19937_64& rng, int m, int rank, double scale)
{
    std::normal_distribution<double> z(0.0, 1.0);
    Eigen::MatrixXd g(m, rank);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < rank; ++j) g(i, j) = z(rng);
    Eigen::MatrixXd a = scale * g * g.transpose();
    return 0.5 * (a + a.transpose());
}

/// Q diag(lambda) Q^T with Haar-random orthogonal Q, `rank` positive
/// eigenvalues log-uniform over `decades` below `scale`, the rest exactly zero.
inline Eigen::MatrixXd random_psd(std::mt19937_64& rng, int m, int rank, double scale, double decades = 6.0)
{
    std::normal_distribution<double> z(0.0, 1.0);
    std::uniform_real_distribution<double> u(-decades, 0.0);
    Eigen::MatrixXd g(m, m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) g(i, j) = z(rng);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
    Eigen::MatrixXd q = qr.householderQ();
    // Sign fix on R's diagonal makes Q Haar distributed.
    for (int j = 0; j < m; ++j) {
        if (qr.matrixQR()(j, j) < 0) q.col(j) *= -1.0;
    }
    Eigen::VectorXd lambda = Eigen::VectorXd::Zero(m);
    for (int j = 0; j < rank; ++j) lambda(j) = scale * std::pow(10.0, u(rng));
    Eigen::MatrixXd a = q * lambda.asDiagonal() * q.transpose();
    return 0.5 * (a + a.transpose());
}

/// The four Moore-Penrose conditions, each relative to the norm of its target.
inline double moore_penrose_residual(const Eigen::MatrixXd& a, const Eigen::MatrixXd& p)
{
    const double na = std::max(a.norm(), std::numeric_limits<double>::min());
    const double np = std::max(p.norm(), std::numeric_limits<double>::min());
    const Eigen::MatrixXd ap = a * p;
    const Eigen::MatrixXd pa = p * a;
    const double c1 = (ap * a - a).norm() / na;
    const double c2 = (pa * p - p).norm() / np;
    const double c3 = (ap - ap.transpose()).norm() / std::max(ap.norm(), 1.0);
    const double c4 = (pa - pa.transpose()).norm() / std::max(pa.norm(), 1.0);
    return std::max({c1, c2, c3, c4});
}

/// Same conditions scaled by the operand norms of each product, the rounding
/// floor of evaluating them in floating point. Meaningful for any conditioning.
inline double moore_penrose_ratio(const Eigen::MatrixXd& a, const Eigen::MatrixXd& p)
{
    const double na = std::max(a.norm(), std::numeric_limits<double>::min());
    const double np = std::max(p.norm(), std::numeric_limits<double>::min());
    const Eigen::MatrixXd ap = a * p;
    const Eigen::MatrixXd pa = p * a;
    const double c1 = (ap * a - a).norm() / (na * np * na);
    const double c2 = (pa * p - p).norm() / (np * na * np);
    const double c3 = (ap - ap.transpose()).norm() / (na * np);
    const double c4 = (pa - pa.transpose()).norm() / (na * np);
    return std::max({c1, c2, c3, c4});
}

inline Outcome moore_penrose_conditions(std::mt19937_64& rng, int trials, double tol = 1e-8)
{
    std::uniform_int_distribution<int> m_dist(2, 6);
    std::uniform_real_distribution<double> exponent(-3.0, 3.0);
    Outcome out;
    for (int k = 0; k < trials; ++k) {
        const int m = m_dist(rng);
        std::uniform_int_distribution<int> rank_dist(1, m);
        const int rank = rank_dist(rng);
        const double scale = std::pow(10.0, exponent(rng));
        const auto a = random_psd(rng, m, rank, scale);
        const double residual = moore_penrose_residual(a, moore_penrose_pinv(a));
        out.record(residual <= tol, residual);
    }
    return out;
}

inline Outcome moore_penrose_gram_ratio(std::mt19937_64& rng, int trials, double tol = 1e-12)
{
    std::uniform_int_distribution<int> m_dist(2, 6);
    std::uniform_real_distribution<double> exponent(-3.0, 3.0);
    Outcome out;
    for (int k = 0; k < trials; ++k) {
        const int m = m_dist(rng);
        std::uniform_int_distribution<int> rank_dist(1, m);
        const int rank = rank_dist(rng);
        const double scale = std::pow(10.0, exponent(rng));
        const auto a = random_gram(rng, m, rank, scale);
        const double ratio = moore_penrose_ratio(a, moore_penrose_pinv(a));
        out.record(ratio <= tol, ratio);
    }
    return out;
}

struct UniformCase {
    std::vector<Coord> coords;
    oracle::Matrix cols;
};

/// A cluster around the origin plus two anchors on the x axis whose values sit
/// at the cluster means. At proportion 1 the boxcar window of every location
/// drops exactly one anchor (its farthest point), so each window holds n - 1
/// observations and reproduces the global coefficient exactly.
inline UniformCase uniform_case(std::mt19937_64& rng, std::size_t n)
{
    std::uniform_real_distribution<double> u(-100.0, 100.0);
    UniformCase c;
    c.cols = oracle::random_columns(rng, 2, n - 2);
    for (std::size_t j = 0; j + 2 < n; ++j) {
        double x = u(rng);
        while (x == 0.0) x = u(rng);
        c.coords.push_back({x, u(rng)});
    }
    for (auto& col : c.cols) {
        double mean = 0.0;
        for (double v : col) mean += v;
        mean /= static_cast<double>(col.size());
        col.push_back(mean);
        col.push_back(mean);
    }
    c.coords.push_back({-1000.0, 0.0});
    c.coords.push_back({1000.0, 0.0});
    return c;
}

struct UniformGap {
    double coef = 0.0;
    double pval = 0.0;
};

/// Boxcar at proportion 1 against the unweighted Pearson coefficient and the
/// classical t-test with n - 1 observations.
inline UniformGap uniform_reduction_gap(const UniformCase& c)
{
    AnalysisSpec spec;
    spec.var_a = "c0";
    spec.var_b = "c1";
    spec.kernel = KernelKind::Boxcar;
    spec.bandwidth = BandwidthSpec(1.0);
    const auto surface = compute_surface(to_data(c.cols), c.coords, spec);

    const double r = oracle::pearson(c.cols[0], c.cols[1]);
    const double df = static_cast<double>(c.coords.size()) - 1.0 - 2.0;
    const double p = oracle::t_two_sided(r * std::sqrt(df / (1.0 - r * r)), df);
    UniformGap gap;
    for (const auto& local : surface.per_location) {
        if (!local.valid[0]) return {std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
        gap.coef = std::max(gap.coef, std::abs(local.coefficients[0] - r));
        gap.pval = std::max(gap.pval, std::abs(local.p_values[0] - p));
    }
    return gap;
}

} // namespace props
