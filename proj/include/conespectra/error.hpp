#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace cs {

enum class ErrorKind {
  RankDeficient,
  DimensionMismatch,
  DegenerateDecomposition,
  OutsideChart,
  InsufficientSamples,
  MissingTaylorData,
  DegenerateSymbol,
  NotABoundaryPoint,
  PrincipalPartMismatch,
  OutOfStrip,
  UnsupportedSymbolStructure,
  UnsupportedOperator,
  NumericalBreakdown,
  AmbiguousMembership,
  QuadratureFailure,
  NoBackgroundResolventFound,
  SingularSystem,
  RootPolishDiverged,
  SingularPairing,
  NotSymmetric,
  DegenerateKernel,
  ConfigParse,
  SchemaViolation,
};

std::string_view to_string(ErrorKind k);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace cs
