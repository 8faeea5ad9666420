#include "splinefit/error.hpp"

namespace splinefit {

std::string_view error_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::MissingColumn: return "MissingColumn";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::EmptyFile: return "EmptyFile";
    case ErrorCode::NonFiniteValue: return "NonFiniteValue";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::DegenerateSplit: return "DegenerateSplit";
    case ErrorCode::DegenerateDomain: return "DegenerateDomain";
    case ErrorCode::DuplicateKnots: return "DuplicateKnots";
    case ErrorCode::DegreeZero: return "DegreeZero";
    case ErrorCode::DimensionTooSmall: return "DimensionTooSmall";
    case ErrorCode::OrderTooLarge: return "OrderTooLarge";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::OutOfDomain: return "OutOfDomain";
    case ErrorCode::SingularSystem: return "SingularSystem";
    case ErrorCode::EdfExceedsN: return "EdfExceedsN";
    case ErrorCode::LeverageOne: return "LeverageOne";
    case ErrorCode::ZeroVariance: return "ZeroVariance";
    case ErrorCode::DegenerateCovariance: return "DegenerateCovariance";
    case ErrorCode::NoSuccessfulFits: return "NoSuccessfulFits";
  }
  return "Unknown";
}

bool is_usage_error(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument:
    case ErrorCode::MissingColumn:
    case ErrorCode::ParseError:
    case ErrorCode::EmptyFile:
    case ErrorCode::NonFiniteValue:
    case ErrorCode::LengthMismatch:
    case ErrorCode::DegenerateSplit:
    case ErrorCode::DegenerateDomain:
    case ErrorCode::DuplicateKnots:
    case ErrorCode::DegreeZero:
    case ErrorCode::DimensionTooSmall:
    case ErrorCode::OrderTooLarge:
    case ErrorCode::IoError:
      return true;
    default:
      return false;
  }
}

Error::Error(ErrorCode code, const std::string& detail, std::optional<std::size_t> index)
    : std::runtime_error(std::string(error_name(code)) + ": " + detail), code_(code), index_(index) {}

}  // namespace splinefit
