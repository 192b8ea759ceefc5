#pragma once

#include <stdexcept>
#include <string>

namespace nk {

enum class ErrorKind {
  ExponentChainViolated,
  DimensionViolated,
  NegativeWeight,
  InvalidParameter,
  ConfigParse,
  UnsupportedDimension,
  NonconformingFunction,
  OnBoundary,
  NonpositiveT,
  DegenerateProfile,
  NoRootBracket,
  CutoffExceedsDomain,
  InsufficientGrid,
  WrongSignWeight,
  SingularEvaluation,
  ProjectionLost,
  Stalled
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const { return kind_; }

  // 1 for input/validation problems, 2 for solver failures.
  int exit_code() const;

 private:
  ErrorKind kind_;
};

}  // namespace nk
