#include "wireinspect/error.hpp"

#include <string>

namespace wireinspect {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::RoiOutOfBounds: return "RoiOutOfBounds";
    case ErrorCode::ImageTooNarrow: return "ImageTooNarrow";
    case ErrorCode::EndpointCountMismatch: return "EndpointCountMismatch";
    case ErrorCode::MalformedAlternation: return "MalformedAlternation";
    case ErrorCode::DegenerateBox: return "DegenerateBox";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::SampleCountTooLow: return "SampleCountTooLow";
    case ErrorCode::WireCountInconsistent: return "WireCountInconsistent";
    case ErrorCode::EmptyPatch: return "EmptyPatch";
    case ErrorCode::ZeroVector: return "ZeroVector";
    case ErrorCode::TrainingSampleUnclear: return "TrainingSampleUnclear";
    case ErrorCode::ProfileVersionMismatch: return "ProfileVersionMismatch";
    case ErrorCode::FormatVersionUnsupported: return "FormatVersionUnsupported";
    case ErrorCode::CorruptProfile: return "CorruptProfile";
    case ErrorCode::SpecInvalid: return "SpecInvalid";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

EndpointCountMismatch::EndpointCountMismatch(int found, int expected)
    : Error(ErrorCode::EndpointCountMismatch,
            "EndpointCountMismatch(" + std::to_string(found) + ", " + std::to_string(expected) +
                ")"),
      found_(found),
      expected_(expected) {}

}  // namespace wireinspect
