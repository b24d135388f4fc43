#include "ndlab/error.hpp"

namespace ndlab {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::EmptyInterior: return "EmptyInterior";
    case ErrorCode::InvalidShape: return "InvalidShape";
    case ErrorCode::AsymmetricInput: return "AsymmetricInput";
    case ErrorCode::InvalidCoefficient: return "InvalidCoefficient";
    case ErrorCode::BlendFailure: return "BlendFailure";
    case ErrorCode::SupportOverrun: return "SupportOverrun";
    case ErrorCode::SyntaxError: return "SyntaxError";
    case ErrorCode::UnknownIdentifier: return "UnknownIdentifier";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::SolverDivergence: return "SolverDivergence";
    case ErrorCode::SingularSystem: return "SingularSystem";
    case ErrorCode::NearSingular: return "NearSingular";
    case ErrorCode::StepRejection: return "StepRejection";
    case ErrorCode::NotMonotone: return "NotMonotone";
    case ErrorCode::DisconnectedDomain: return "DisconnectedDomain";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Error";
}

}  // namespace ndlab
