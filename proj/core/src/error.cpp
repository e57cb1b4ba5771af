#include "ppl/error.hpp"

namespace ppl {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::EmptyDomain: return "EmptyDomain";
    case ErrorCode::DegenerateBox: return "DegenerateBox";
    case ErrorCode::NaNValue: return "NaNValue";
    case ErrorCode::TooCoarse: return "TooCoarse";
    case ErrorCode::RegionEmpty: return "RegionEmpty";
    case ErrorCode::InfeasibleBoundary: return "InfeasibleBoundary";
    case ErrorCode::MaxIterations: return "MaxIterations";
    case ErrorCode::NonNestedDomains: return "NonNestedDomains";
    case ErrorCode::MissingLevels: return "MissingLevels";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::ScheduleExhausted: return "ScheduleExhausted";
    case ErrorCode::OriginNotInDomain: return "OriginNotInDomain";
    case ErrorCode::EmptyCandidates: return "EmptyCandidates";
    case ErrorCode::QuadratureUnstable: return "QuadratureUnstable";
    case ErrorCode::BadOrder: return "BadOrder";
    case ErrorCode::IllConditioned: return "IllConditioned";
    case ErrorCode::WindowOutsideValidity: return "WindowOutsideValidity";
    case ErrorCode::WindowMismatch: return "WindowMismatch";
    case ErrorCode::MassNotConcentrated: return "MassNotConcentrated";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::SchemaError: return "SchemaError";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& what)
    : std::runtime_error(std::string(error_code_name(code)) + ": " + what), code_(code) {}

void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

}  // namespace ppl
