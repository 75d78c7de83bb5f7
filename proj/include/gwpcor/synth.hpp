#pragma once

#include <cstddef>
#include <cstdint>

#include "gwpcor/geodata.hpp"

namespace gwpcor {

/// Side of the square the synthetic points are drawn from, metres. Large
/// enough that the coordinates are never mistaken for lon/lat.
inline constexpr double kSynthExtent = 10000.0;

/// Deterministic point dataset with variables v1..vm. The local correlation
/// of (v1, v2) follows cos(pi * x / extent), positive in the west half of the
/// square and negative in the east; further variables mix the same latent
/// fields with location-dependent loadings.
Dataset synth_dataset(std::size_t n, std::size_t m, std::uint64_t seed);

} // namespace gwpcor
