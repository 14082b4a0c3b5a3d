#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace docsynth {

/// Machine-readable failure categories. The CLI maps these onto exit codes
/// and prints the name alongside the message.
enum class ErrorCode {
  DuplicateId,
  UnknownParent,
  CycleDetected,
  InvalidHyperparam,
  MissingTemplateParam,
  DimensionMismatch,
  NegativeCount,
  ObservationBelowLocation,
  UnknownNode,
  UnsupportedFamily,
  ParseError,
  MissingNodeParams,
  UnresolvedResource,
  UnknownOverrideKey,
  EmptyImageLibrary,
  FontResolutionFailed,
  FontGlyphMissing,
  ElementTooLargeForPage,
  BoxTooSmall,
  ImageDecodeError,
  IoError,
  MissingManifest,
  InvalidArgument,
};

std::string_view to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace docsynth
