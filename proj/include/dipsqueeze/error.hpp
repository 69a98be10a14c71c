#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace dipsqueeze {

enum class ErrorCode {
  NonHermitianInput,
  DimensionMismatch,
  NonRealExpectation,
  NegativeVariance,
  SiteOutOfRange,
  InvalidDensityMatrix,
  InvalidState,
  AsymmetricCouplings,
  CoincidentPositions,
  InvalidGeometry,
  EmptyGrid,
  InvalidGrid,
  AllPointsDegenerate,
  InvalidN,
  SchemaError,
  ValidationError,
  IoError,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Every failure in the library is reported through this type; `code()`
/// lets callers (and the CLI exit-code mapping) branch without parsing text.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  [[nodiscard]] ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace dipsqueeze
