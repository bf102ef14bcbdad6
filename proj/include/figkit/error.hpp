#pragma once

#include <stdexcept>
#include <string>

namespace figkit {

enum class ErrorCode {
  InvalidArgument,
  ZeroVariance,
  UnknownColor,
  WrongArity,
  ImageTooSmall,
  MixedOntologies,
  TexelTooSmall,
  EmptySet,
  EmptyClass,
  ZeroVarianceVector,
  TooFewSamples,
  ShapeMismatch,
  InsufficientPoints,
  Unreachable,
  EmptySeries,
  LayoutMismatch,
  Io,
  Parse,
};

const char* to_string(ErrorCode code) noexcept;

/// Base exception for every failure the library reports. Degenerate inputs
/// that have a sensible fallback are reported through flags on the result
/// instead.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace figkit
