#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace wireinspect {

enum class ErrorCode {
  RoiOutOfBounds,
  ImageTooNarrow,
  EndpointCountMismatch,
  MalformedAlternation,
  DegenerateBox,
  ShapeMismatch,
  SampleCountTooLow,
  WireCountInconsistent,
  EmptyPatch,
  ZeroVector,
  TrainingSampleUnclear,
  ProfileVersionMismatch,
  FormatVersionUnsupported,
  CorruptProfile,
  SpecInvalid,
  IndexOutOfRange,
  InvalidConfig,
  Io,
};

std::string_view to_string(ErrorCode code);

/// Base exception for every failure raised by the library. The code is the
/// stable, machine-readable part; the message is for humans.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

class EndpointCountMismatch : public Error {
 public:
  EndpointCountMismatch(int found, int expected);

  int found() const noexcept { return found_; }
  int expected() const noexcept { return expected_; }

 private:
  int found_;
  int expected_;
};

}  // namespace wireinspect
