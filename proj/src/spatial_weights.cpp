#include "gwpcor/spatial_weights.hpp"

#include <algorithm>
#include <limits>
#include <string>

namespace gwpcor {

std::string_view to_string(KernelKind kind)
{
    switch (kind) {
    case KernelKind::Gaussian: return "gaussian";
    case KernelKind::Exponential: return "exponential";
    case KernelKind::Boxcar: return "boxcar";
    case KernelKind::Bisquare: return "bisquare";
    case KernelKind::Tricube: return "tricube";
    }
    return "unknown";
}

KernelKind parse_kernel(std::string_view name)
{
    for (auto kind : {KernelKind::Gaussian, KernelKind::Exponential, KernelKind::Boxcar,
                      KernelKind::Bisquare, KernelKind::Tricube}) {
        if (name == to_string(kind)) return kind;
    }
    throw Error(ErrorKind::InvalidSpec, "unknown kernel '" + std::string(name) + "'");
}

BandwidthSpec::BandwidthSpec(double proportion) : proportion_(proportion)
{
    if (!(proportion > 0.0 && proportion <= 1.0)) {
        throw Error(ErrorKind::InvalidSpec,
                    "bandwidth proportion must lie in (0, 1], got " + std::to_string(proportion));
    }
}

std::size_t BandwidthSpec::neighbour_count(std::size_t n) const
{
    // The (1 - 1e-12) factor absorbs representation error such as 0.1 * 30 = 3.0000000000000004.
    const double raw = std::ceil(proportion_ * static_cast<double>(n) * (1.0 - 1e-12));
    auto k = static_cast<std::size_t>(std::max(raw, 2.0));
    return std::min(k, n);
}

namespace detail {

double bandwidth_from_distances(std::span<double> distances, std::size_t k)
{
    auto nth = distances.begin() + static_cast<std::ptrdiff_t>(k - 1);
    std::nth_element(distances.begin(), nth, distances.end());
    const double b = *nth;
    if (b > 0.0) return b;

    // Duplicate coordinates: the k nearest all coincide with the focal point.
    double smallest = std::numeric_limits<double>::infinity();
    for (double d : distances) {
        if (d > 0.0 && d < smallest) smallest = d;
    }
    if (!std::isfinite(smallest)) {
        throw Error(ErrorKind::AllCoincident, "all observations share a single coordinate");
    }
    return smallest;
}

} // namespace detail

double kernel_weight(KernelKind kind, double d, double b)
{
    if (!(b > 0.0)) {
        throw Error(ErrorKind::NonPositiveBandwidth, "bandwidth must be positive");
    }
    return detail::kernel_weight_unchecked(kind, d, b);
}

double adaptive_bandwidth_at(std::size_t i, std::span<const Coord> coords, const BandwidthSpec& bw)
{
    const std::size_t n = coords.size();
    if (n < 2) throw Error(ErrorKind::InvalidSpec, "adaptive bandwidth needs at least two points");
    if (i >= n) throw Error(ErrorKind::InvalidSpec, "focal index out of range");

    std::vector<double> distances(n);
    for (std::size_t j = 0; j < n; ++j) distances[j] = pairwise_distance(coords[i], coords[j]);
    return detail::bandwidth_from_distances(distances, bw.neighbour_count(n));
}

WeightVector weight_vector_at(std::size_t i, std::span<const Coord> coords, KernelKind kernel,
                              const BandwidthSpec& bw)
{
    WeightVector out;
    out.owner_index = i;
    out.bandwidth_used = adaptive_bandwidth_at(i, coords, bw);
    out.weights.resize(coords.size());
    for (std::size_t j = 0; j < coords.size(); ++j) {
        out.weights[j] = detail::kernel_weight_unchecked(kernel, pairwise_distance(coords[i], coords[j]),
                                                         out.bandwidth_used);
    }
    return out;
}

} // namespace gwpcor
