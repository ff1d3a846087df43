#pragma once

#include <stdexcept>
#include <string>

namespace loopcalc {

enum class ErrorKind {
  EndpointMismatch,
  DimMismatch,
  ZeroDirection,
  DependentDirections,
  IndexOutOfRange,
  ShapeMismatch,
  RadiusExceeded,
  DimTooSmall,
  InvalidArgument,
  Parse,
};

const char *to_string(ErrorKind kind);

/// Single exception type for the library; `kind()` tells callers what went wrong.
class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, const std::string &what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

private:
  ErrorKind kind_;
};

} // namespace loopcalc
