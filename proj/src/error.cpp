#include "docsynth/error.hpp"

namespace docsynth {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::DuplicateId: return "DuplicateId";
    case ErrorCode::UnknownParent: return "UnknownParent";
    case ErrorCode::CycleDetected: return "CycleDetected";
    case ErrorCode::InvalidHyperparam: return "InvalidHyperparam";
    case ErrorCode::MissingTemplateParam: return "MissingTemplateParam";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NegativeCount: return "NegativeCount";
    case ErrorCode::ObservationBelowLocation: return "ObservationBelowLocation";
    case ErrorCode::UnknownNode: return "UnknownNode";
    case ErrorCode::UnsupportedFamily: return "UnsupportedFamily";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::MissingNodeParams: return "MissingNodeParams";
    case ErrorCode::UnresolvedResource: return "UnresolvedResource";
    case ErrorCode::UnknownOverrideKey: return "UnknownOverrideKey";
    case ErrorCode::EmptyImageLibrary: return "EmptyImageLibrary";
    case ErrorCode::FontResolutionFailed: return "FontResolutionFailed";
    case ErrorCode::FontGlyphMissing: return "FontGlyphMissing";
    case ErrorCode::ElementTooLargeForPage: return "ElementTooLargeForPage";
    case ErrorCode::BoxTooSmall: return "BoxTooSmall";
    case ErrorCode::ImageDecodeError: return "ImageDecodeError";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::MissingManifest: return "MissingManifest";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

}  // namespace docsynth
