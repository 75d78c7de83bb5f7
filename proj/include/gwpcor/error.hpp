#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace gwpcor {

enum class ErrorKind {
    AllCoincident,
    NonPositiveBandwidth,
    ZeroTotalWeight,
    InvalidSpec,
    SpecMismatch,
    PairNotInSurface,
    MalformedInput,
    MixedGeometry,
    EmptyCollection,
    FewerThanThreeFeatures,
    MissingColumn,
    NonNumericCoordinate,
    TooFewComplete,
    IndexMismatch,
    Timeout,
};

std::string_view to_string(ErrorKind kind);

/// Every recoverable failure in the library is reported as an Error carrying
/// a kind that callers (HTTP layer, CLI) map onto status and exit codes.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(message), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

} // namespace gwpcor
