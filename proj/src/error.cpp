#include "mfxwt/error.hpp"

namespace mfxwt {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::SeriesTooShort: return "SeriesTooShort";
    case ErrorCode::NonFiniteInput: return "NonFiniteInput";
    case ErrorCode::InvalidKernel: return "InvalidKernel";
    case ErrorCode::InvalidScaleGrid: return "InvalidScaleGrid";
    case ErrorCode::InvalidOrderGrid: return "InvalidOrderGrid";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::DegenerateField: return "DegenerateField";
    case ErrorCode::RangeTooNarrow: return "RangeTooNarrow";
    case ErrorCode::ZeroCoefficient: return "ZeroCoefficient";
    case ErrorCode::NegativeMeasure: return "NegativeMeasure";
    case ErrorCode::IndivisibleLength: return "IndivisibleLength";
    case ErrorCode::NoCommonScales: return "NoCommonScales";
    case ErrorCode::ZeroOrder: return "ZeroOrder";
    case ErrorCode::InvalidParameter: return "InvalidParameter";
    case ErrorCode::KTooLarge: return "KTooLarge";
    case ErrorCode::InfeasibleCorrelation: return "InfeasibleCorrelation";
    case ErrorCode::ConstantInput: return "ConstantInput";
    case ErrorCode::ShiftOutOfRange: return "ShiftOutOfRange";
    case ErrorCode::EnsembleTooSmall: return "EnsembleTooSmall";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::DuplicateDate: return "DuplicateDate";
    case ErrorCode::NonPositivePrice: return "NonPositivePrice";
    case ErrorCode::EmptyIntersection: return "EmptyIntersection";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::Usage: return "Usage";
  }
  return "Unknown";
}

ErrorCategory category(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::Usage:
    case ErrorCode::InvalidArgument:
    case ErrorCode::InvalidKernel:
    case ErrorCode::InvalidScaleGrid:
    case ErrorCode::InvalidOrderGrid:
    case ErrorCode::InvalidParameter:
    case ErrorCode::KTooLarge:
    case ErrorCode::ShiftOutOfRange:
    case ErrorCode::EnsembleTooSmall:
    case ErrorCode::RangeTooNarrow:
    case ErrorCode::ZeroOrder:
      return ErrorCategory::Usage;
    case ErrorCode::SeriesTooShort:
    case ErrorCode::NonFiniteInput:
    case ErrorCode::ShapeMismatch:
    case ErrorCode::NegativeMeasure:
    case ErrorCode::IndivisibleLength:
    case ErrorCode::ConstantInput:
    case ErrorCode::ParseError:
    case ErrorCode::DuplicateDate:
    case ErrorCode::NonPositivePrice:
    case ErrorCode::EmptyIntersection:
    case ErrorCode::IoError:
      return ErrorCategory::Data;
    case ErrorCode::DegenerateField:
    case ErrorCode::ZeroCoefficient:
    case ErrorCode::NoCommonScales:
    case ErrorCode::InfeasibleCorrelation:
      return ErrorCategory::Numerical;
  }
  return ErrorCategory::Numerical;
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

}  // namespace mfxwt
