#include "manialign/error.hpp"

namespace manialign {

ErrorCategory category_of(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::BadConfig:
    case ErrorKind::BadSpec:
      return ErrorCategory::Config;
    case ErrorKind::NonFinite:
    case ErrorKind::SingularB:
    case ErrorKind::ConvergenceFailure:
    case ErrorKind::RankDeficient:
    case ErrorKind::DegenerateDIS:
      return ErrorCategory::Numerical;
    default:
      return ErrorCategory::Data;
  }
}

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::BadConfig: return "BadConfig";
    case ErrorKind::BadSpec: return "BadSpec";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::EmptyDataset: return "EmptyDataset";
    case ErrorKind::KTooLarge: return "KTooLarge";
    case ErrorKind::SingleClass: return "SingleClass";
    case ErrorKind::NoTies: return "NoTies";
    case ErrorKind::OrderMismatch: return "OrderMismatch";
    case ErrorKind::UnknownDomain: return "UnknownDomain";
    case ErrorKind::CountTooLarge: return "CountTooLarge";
    case ErrorKind::TooFewPerClass: return "TooFewPerClass";
    case ErrorKind::LengthMismatch: return "LengthMismatch";
    case ErrorKind::NoCommonBands: return "NoCommonBands";
    case ErrorKind::TooFewPairs: return "TooFewPairs";
    case ErrorKind::EmptyObject: return "EmptyObject";
    case ErrorKind::DegenerateData: return "DegenerateData";
    case ErrorKind::Io: return "Io";
    case ErrorKind::NonFinite: return "NonFinite";
    case ErrorKind::SingularB: return "SingularB";
    case ErrorKind::ConvergenceFailure: return "ConvergenceFailure";
    case ErrorKind::RankDeficient: return "RankDeficient";
    case ErrorKind::DegenerateDIS: return "DegenerateDIS";
  }
  return "Unknown";
}

Error::Error(ErrorKind kind, std::string_view module, const std::string& message)
    : std::runtime_error(std::string(module) + ": " + message),
      kind_(kind),
      module_(module) {}

int exit_code_for(ErrorCategory category) {
  switch (category) {
    case ErrorCategory::Config: return 2;
    case ErrorCategory::Data: return 3;
    case ErrorCategory::Numerical: return 4;
  }
  return 1;
}

}  // namespace manialign
