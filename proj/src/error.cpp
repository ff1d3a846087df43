#include "loopcalc/error.hpp"

namespace loopcalc {

const char *to_string(ErrorKind kind) {
  switch (kind) {
  case ErrorKind::EndpointMismatch: return "EndpointMismatch";
  case ErrorKind::DimMismatch: return "DimMismatch";
  case ErrorKind::ZeroDirection: return "ZeroDirection";
  case ErrorKind::DependentDirections: return "DependentDirections";
  case ErrorKind::IndexOutOfRange: return "IndexOutOfRange";
  case ErrorKind::ShapeMismatch: return "ShapeMismatch";
  case ErrorKind::RadiusExceeded: return "RadiusExceeded";
  case ErrorKind::DimTooSmall: return "DimTooSmall";
  case ErrorKind::InvalidArgument: return "InvalidArgument";
  case ErrorKind::Parse: return "Parse";
  }
  return "Unknown";
}

} // namespace loopcalc
