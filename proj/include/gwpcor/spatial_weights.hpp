#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "gwpcor/error.hpp"

namespace gwpcor {

struct Coord {
    double x = 0.0;
    double y = 0.0;
};

enum class KernelKind { Gaussian, Exponential, Boxcar, Bisquare, Tricube };

std::string_view to_string(KernelKind kind);
/// Accepts the lower-case names used on the CLI and in requests.
KernelKind parse_kernel(std::string_view name);

inline bool is_compact(KernelKind kind) {
    return kind == KernelKind::Boxcar || kind == KernelKind::Bisquare || kind == KernelKind::Tricube;
}

/// Adaptive bandwidth: the fraction of all observations that falls inside
/// each location's window. Only adaptive bandwidths exist.
class BandwidthSpec {
public:
    explicit BandwidthSpec(double proportion);
    double proportion() const noexcept { return proportion_; }

    /// Neighbour rank k = max(2, ceil(proportion * n)), capped at n.
    std::size_t neighbour_count(std::size_t n) const;

private:
    double proportion_;
};

struct WeightVector {
    std::vector<double> weights;
    std::size_t owner_index = 0;
    double bandwidth_used = 0.0;
};

inline double pairwise_distance(Coord p, Coord q) {
    const double dx = p.x - q.x;
    const double dy = p.y - q.y;
    return std::sqrt(dx * dx + dy * dy);
}

namespace detail {

// Unchecked kernel evaluation for the hot loops; b > 0 is the caller's job.
inline double kernel_weight_unchecked(KernelKind kind, double d, double b) {
    const double u = d / b;
    switch (kind) {
    case KernelKind::Gaussian:
        return std::exp(-0.5 * u * u);
    case KernelKind::Exponential:
        return std::exp(-u);
    case KernelKind::Boxcar:
        return d < b ? 1.0 : 0.0;
    case KernelKind::Bisquare: {
        if (!(d < b)) return 0.0;
        const double t = 1.0 - u * u;
        return t * t;
    }
    case KernelKind::Tricube: {
        if (!(d < b)) return 0.0;
        const double t = 1.0 - u * u * u;
        return t * t * t;
    }
    }
    return 0.0;
}

/// Bandwidth from the distances of one focal location to all n points.
/// Reorders `distances` in place (nth_element).
double bandwidth_from_distances(std::span<double> distances, std::size_t k);

} // namespace detail

/// Weight in [0,1] for distance d under effective bandwidth b. The compact
/// kernels use the strict test d < b, so a point exactly at b gets 0.
double kernel_weight(KernelKind kind, double d, double b);

/// Distance to the k-th nearest observation of location i, counting i itself
/// as the first. Falls back to the smallest positive distance when the k-th
/// distance is zero; throws AllCoincident when no positive distance exists.
double adaptive_bandwidth_at(std::size_t i, std::span<const Coord> coords, const BandwidthSpec& bw);

WeightVector weight_vector_at(std::size_t i, std::span<const Coord> coords, KernelKind kernel,
                              const BandwidthSpec& bw);

} // namespace gwpcor
