#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace splinefit {

enum class ErrorCode {
  // input and usage
  InvalidArgument,
  MissingColumn,
  ParseError,
  EmptyFile,
  NonFiniteValue,
  LengthMismatch,
  DegenerateSplit,
  DegenerateDomain,
  DuplicateKnots,
  DegreeZero,
  DimensionTooSmall,
  OrderTooLarge,
  IoError,
  // numeric and domain
  OutOfDomain,
  SingularSystem,
  EdfExceedsN,
  LeverageOne,
  ZeroVariance,
  DegenerateCovariance,
  NoSuccessfulFits,
};

std::string_view error_name(ErrorCode code);

// Usage errors map to CLI exit code 2, everything else to 1.
bool is_usage_error(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& detail, std::optional<std::size_t> index = std::nullopt);

  ErrorCode code() const noexcept { return code_; }
  std::string_view name() const noexcept { return error_name(code_); }
  // Offending element (row, point or grid index) when one is known.
  std::optional<std::size_t> index() const noexcept { return index_; }

 private:
  ErrorCode code_;
  std::optional<std::size_t> index_;
};

}  // namespace splinefit
