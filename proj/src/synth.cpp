#include "gwpcor/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <random>
#include <string>

namespace gwpcor {

namespace {

// std::*_distribution output is implementation-defined; these are not.
class Stream {
public:
    explicit Stream(std::uint64_t seed) : engine_(seed) {}

    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double normal()
    {
        if (spare_) {
            const double v = *spare_;
            spare_.reset();
            return v;
        }
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = 2.0 * std::numbers::pi * u2;
        spare_ = radius * std::sin(angle);
        return radius * std::cos(angle);
    }

private:
    std::mt19937_64 engine_;
    std::optional<double> spare_;
};

} // namespace

Dataset synth_dataset(std::size_t n, std::size_t m, std::uint64_t seed)
{
    if (n < 10) throw Error(ErrorKind::InvalidSpec, "synthetic datasets need n >= 10");
    if (m < 2) throw Error(ErrorKind::InvalidSpec, "synthetic datasets need at least two variables");

    constexpr double pi = std::numbers::pi;
    Stream rng(seed);
    Dataset d;
    d.geometry_kind = GeometryKind::Point;
    d.columns.assign(m, std::vector<double>(n));
    d.coords.reserve(n);
    d.geometries.reserve(n);

    for (std::size_t r = 0; r < n; ++r) {
        const double x = kSynthExtent * rng.uniform();
        const double y = kSynthExtent * rng.uniform();
        const double sx = x / kSynthExtent;
        const double sy = y / kSynthExtent;

        // Two smooth latent fields plus independent noise.
        const double u = std::sin(2.0 * pi * sx) * std::cos(pi * sy) + 0.5 * rng.normal();
        const double v = std::cos(2.0 * pi * sy) * std::sin(pi * sx) + 0.5 * rng.normal();
        const double rho = std::cos(pi * sx);

        d.columns[0][r] = 10.0 + u;
        d.columns[1][r] = 20.0 + rho * u + std::sqrt(1.0 - rho * rho) * v;
        for (std::size_t c = 2; c < m; ++c) {
            const double load = std::cos(pi * static_cast<double>(c) * sy);
            d.columns[c][r] = 5.0 * static_cast<double>(c) + load * u + 0.5 * v + 0.7 * rng.normal();
        }
        d.coords.push_back({x, y});
        d.geometries.push_back(Json{{"type", "Point"}, {"coordinates", Json::array({x, y})}});
    }

    for (std::size_t c = 0; c < m; ++c) {
        const auto& col = d.columns[c];
        VariableInfo info{"v" + std::to_string(c + 1), 0, col.front(), col.front()};
        for (double val : col) {
            info.min = std::min(info.min, val);
            info.max = std::max(info.max, val);
        }
        d.schema.push_back(std::move(info));
    }
    return d;
}

} // namespace gwpcor
