#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ppl {

enum class ErrorCode {
  EmptyDomain,
  DegenerateBox,
  NaNValue,
  TooCoarse,
  RegionEmpty,
  InfeasibleBoundary,
  MaxIterations,
  NonNestedDomains,
  MissingLevels,
  DimensionMismatch,
  ScheduleExhausted,
  OriginNotInDomain,
  EmptyCandidates,
  QuadratureUnstable,
  BadOrder,
  IllConditioned,
  WindowOutsideValidity,
  WindowMismatch,
  MassNotConcentrated,
  InvalidArgument,
  SchemaError,
  Io,
};

std::string_view error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what);
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& what);

}  // namespace ppl
