#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace roesser2d {

// Base for all toolbox errors. `code()` is the stable machine-readable
// identifier surfaced in CLI diagnostics.
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& message)
      : std::runtime_error(message), code_(std::move(code)) {}
  const std::string& code() const noexcept { return code_; }

 private:
  std::string code_;
};

#define ROESSER2D_DEFINE_ERROR(NAME, CODE)                    \
  class NAME : public Error {                                 \
   public:                                                    \
    explicit NAME(const std::string& message)                 \
        : Error(CODE, message) {}                             \
  }

ROESSER2D_DEFINE_ERROR(DimensionMismatch, "DIMENSION_MISMATCH");
ROESSER2D_DEFINE_ERROR(NonBlockDiagonalE, "NON_BLOCK_DIAGONAL_E");
ROESSER2D_DEFINE_ERROR(ParseError, "PARSE");
ROESSER2D_DEFINE_ERROR(SchemaError, "SCHEMA");
ROESSER2D_DEFINE_ERROR(SizeLimit, "SIZE_LIMIT");
ROESSER2D_DEFINE_ERROR(NotRegular, "NOT_REGULAR");
ROESSER2D_DEFINE_ERROR(VariantUnsupported, "VARIANT_UNSUPPORTED");
ROESSER2D_DEFINE_ERROR(NoActuation, "NO_ACTUATION");
ROESSER2D_DEFINE_ERROR(NoMeasurement, "NO_MEASUREMENT");
ROESSER2D_DEFINE_ERROR(BadProblem, "BAD_PROBLEM");
ROESSER2D_DEFINE_ERROR(BackendError, "BACKEND");
ROESSER2D_DEFINE_ERROR(NonCausalPointwise, "NON_CAUSAL_POINTWISE");
ROESSER2D_DEFINE_ERROR(BoundaryDimensionMismatch, "BOUNDARY_DIMENSION_MISMATCH");
ROESSER2D_DEFINE_ERROR(InvalidParams, "INVALID_PARAMS");
ROESSER2D_DEFINE_ERROR(IoError, "IO");

#undef ROESSER2D_DEFINE_ERROR

}  // namespace roesser2d
