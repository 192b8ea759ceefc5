#include "nk/errors.hpp"

namespace nk {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::ExponentChainViolated: return "ExponentChainViolated";
    case ErrorKind::DimensionViolated: return "DimensionViolated";
    case ErrorKind::NegativeWeight: return "NegativeWeight";
    case ErrorKind::InvalidParameter: return "InvalidParameter";
    case ErrorKind::ConfigParse: return "ConfigParse";
    case ErrorKind::UnsupportedDimension: return "UnsupportedDimension";
    case ErrorKind::NonconformingFunction: return "NonconformingFunction";
    case ErrorKind::OnBoundary: return "OnBoundary";
    case ErrorKind::NonpositiveT: return "NonpositiveT";
    case ErrorKind::DegenerateProfile: return "DegenerateProfile";
    case ErrorKind::NoRootBracket: return "NoRootBracket";
    case ErrorKind::CutoffExceedsDomain: return "CutoffExceedsDomain";
    case ErrorKind::InsufficientGrid: return "InsufficientGrid";
    case ErrorKind::WrongSignWeight: return "WrongSignWeight";
    case ErrorKind::SingularEvaluation: return "SingularEvaluation";
    case ErrorKind::ProjectionLost: return "ProjectionLost";
    case ErrorKind::Stalled: return "Stalled";
  }
  return "Unknown";
}

int Error::exit_code() const {
  switch (kind_) {
    case ErrorKind::ProjectionLost:
    case ErrorKind::Stalled:
    case ErrorKind::NoRootBracket:
    case ErrorKind::SingularEvaluation:
      return 2;
    default:
      return 1;
  }
}

}  // namespace nk
