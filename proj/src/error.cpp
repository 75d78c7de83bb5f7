#include "gwpcor/error.hpp"

namespace gwpcor {

std::string_view to_string(ErrorKind kind)
{
    switch (kind) {
    case ErrorKind::AllCoincident: return "AllCoincident";
    case ErrorKind::NonPositiveBandwidth: return "NonPositiveBandwidth";
    case ErrorKind::ZeroTotalWeight: return "ZeroTotalWeight";
    case ErrorKind::InvalidSpec: return "InvalidSpec";
    case ErrorKind::SpecMismatch: return "SpecMismatch";
    case ErrorKind::PairNotInSurface: return "PairNotInSurface";
    case ErrorKind::MalformedInput: return "MalformedInput";
    case ErrorKind::MixedGeometry: return "MixedGeometry";
    case ErrorKind::EmptyCollection: return "EmptyCollection";
    case ErrorKind::FewerThanThreeFeatures: return "FewerThanThreeFeatures";
    case ErrorKind::MissingColumn: return "MissingColumn";
    case ErrorKind::NonNumericCoordinate: return "NonNumericCoordinate";
    case ErrorKind::TooFewComplete: return "TooFewComplete";
    case ErrorKind::IndexMismatch: return "IndexMismatch";
    case ErrorKind::Timeout: return "Timeout";
    }
    return "Unknown";
}

} // namespace gwpcor
