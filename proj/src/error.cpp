#include "conespectra/error.hpp"

namespace cs {

std::string_view to_string(ErrorKind k) {
  switch (k) {
    case ErrorKind::RankDeficient: return "RankDeficient";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::DegenerateDecomposition: return "DegenerateDecomposition";
    case ErrorKind::OutsideChart: return "OutsideChart";
    case ErrorKind::InsufficientSamples: return "InsufficientSamples";
    case ErrorKind::MissingTaylorData: return "MissingTaylorData";
    case ErrorKind::DegenerateSymbol: return "DegenerateSymbol";
    case ErrorKind::NotABoundaryPoint: return "NotABoundaryPoint";
    case ErrorKind::PrincipalPartMismatch: return "PrincipalPartMismatch";
    case ErrorKind::OutOfStrip: return "OutOfStrip";
    case ErrorKind::UnsupportedSymbolStructure: return "UnsupportedSymbolStructure";
    case ErrorKind::UnsupportedOperator: return "UnsupportedOperator";
    case ErrorKind::NumericalBreakdown: return "NumericalBreakdown";
    case ErrorKind::AmbiguousMembership: return "AmbiguousMembership";
    case ErrorKind::QuadratureFailure: return "QuadratureFailure";
    case ErrorKind::NoBackgroundResolventFound: return "NoBackgroundResolventFound";
    case ErrorKind::SingularSystem: return "SingularSystem";
    case ErrorKind::RootPolishDiverged: return "RootPolishDiverged";
    case ErrorKind::SingularPairing: return "SingularPairing";
    case ErrorKind::NotSymmetric: return "NotSymmetric";
    case ErrorKind::DegenerateKernel: return "DegenerateKernel";
    case ErrorKind::ConfigParse: return "ConfigParse";
    case ErrorKind::SchemaViolation: return "SchemaViolation";
  }
  return "Unknown";
}

}  // namespace cs
