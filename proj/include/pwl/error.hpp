#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace pwl {

// Values are part of the C ABI (see pwl.h); append only.
enum class ErrorCode : int {
  Ok = 0,
  NotAProbability = 1,
  NotSymmetric = 2,
  NotAntisymmetric = 3,
  Reducible = 4,
  DimensionMismatch = 5,
  DegenerateCovariance = 6,
  BoxTooSmall = 7,
  WrongParity = 8,
  CapExceeded = 9,
  GridTooSmall = 10,
  SingularCovariance = 11,
  QuadratureNotConverged = 12,
  UnsupportedDimension = 13,
  Periodic = 14,
  InvalidArgument = 15,
  Io = 16,
  Parse = 17,
  ScaleGuard = 18,
  Internal = 19,
};

std::string_view error_name(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(error_name(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace pwl
