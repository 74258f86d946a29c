#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace mfxwt {

enum class ErrorCode {
  InvalidArgument,
  SeriesTooShort,
  NonFiniteInput,
  InvalidKernel,
  InvalidScaleGrid,
  InvalidOrderGrid,
  ShapeMismatch,
  DegenerateField,
  RangeTooNarrow,
  ZeroCoefficient,
  NegativeMeasure,
  IndivisibleLength,
  NoCommonScales,
  ZeroOrder,
  InvalidParameter,
  KTooLarge,
  InfeasibleCorrelation,
  ConstantInput,
  ShiftOutOfRange,
  EnsembleTooSmall,
  ParseError,
  DuplicateDate,
  NonPositivePrice,
  EmptyIntersection,
  IoError,
  Usage,
};

// Coarse grouping used by the CLI to pick an exit status.
enum class ErrorCategory { Usage, Data, Numerical };

std::string_view to_string(ErrorCode code) noexcept;
ErrorCategory category(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace mfxwt
