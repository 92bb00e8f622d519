#include "pwl/error.hpp"

namespace pwl {

std::string_view error_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::Ok: return "Ok";
    case ErrorCode::NotAProbability: return "NotAProbability";
    case ErrorCode::NotSymmetric: return "NotSymmetric";
    case ErrorCode::NotAntisymmetric: return "NotAntisymmetric";
    case ErrorCode::Reducible: return "Reducible";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::DegenerateCovariance: return "DegenerateCovariance";
    case ErrorCode::BoxTooSmall: return "BoxTooSmall";
    case ErrorCode::WrongParity: return "WrongParity";
    case ErrorCode::CapExceeded: return "CapExceeded";
    case ErrorCode::GridTooSmall: return "GridTooSmall";
    case ErrorCode::SingularCovariance: return "SingularCovariance";
    case ErrorCode::QuadratureNotConverged: return "QuadratureNotConverged";
    case ErrorCode::UnsupportedDimension: return "UnsupportedDimension";
    case ErrorCode::Periodic: return "Periodic";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::Io: return "Io";
    case ErrorCode::Parse: return "Parse";
    case ErrorCode::ScaleGuard: return "ScaleGuard";
    case ErrorCode::Internal: return "Internal";
  }
  return "Unknown";
}

}  // namespace pwl
