#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "conespectra/cone1d.hpp"
#include "conespectra/spectra.hpp"

namespace cs {

inline constexpr std::string_view kSchema = "cone-spectra/1";

struct OperatorDecl {
  std::string preset;  // empty for explicit operators
  double rho = 1.0;
  bool half_line = false;
  double a = -1.0, b = 1.0;
  ExpPoly p = ExpPoly(1.0), q;
  cplx p0 = 1.0, q0 = 0.0;  // half-line coefficients

  ConeOperator1D build() const;
};

struct DomainDecl {
  enum class Kind { Alpha, Matrix, Min, Max };
  Kind kind = Kind::Alpha;
  cplx alpha_minus = 1.0, alpha_plus = 1.0;
  Mat matrix;

  /// Resolves against dim E_max = d; SchemaViolation(key) if the shapes disagree.
  DomainSpec resolve(int d, const std::string& name) const;
};

struct SpectrumTask {
  std::string domain;
  std::optional<RayRegion> ray;
  std::optional<RectRegion> rect;
};

struct RayCheckTask {
  std::string domain;
  cplx lambda_hat = cplx(0.0, 1.0);
  Side side = Side::Left;  // endpoint whose model is used for interval operators
  double xi_max = 10.0;
  int samples = 512;
  double floor = 1e-8;
};

struct SelfAdjointTask {
  std::vector<std::string> domains;
};

struct ResolventTask {
  std::string domain;
  cplx lambda = cplx(0.0, 1.0);
  ExpPoly rhs = ExpPoly(1.0);
};

struct IndicesTask {};

struct ProblemConfig {
  OperatorDecl op;
  std::map<std::string, DomainDecl> domains;
  std::optional<SpectrumTask> spectrum;
  std::optional<RayCheckTask> ray_check;
  std::optional<SelfAdjointTask> selfadjoint;
  std::optional<ResolventTask> resolvent;
  std::optional<IndicesTask> indices;
  double tol = 1e-8;
  int threads = 0;  // 0: CONESPECTRA_THREADS or 1
  std::string output = ".";
};

/// Parses and validates a JSON config. Throws ConfigParse ("line N: ...") or
/// SchemaViolation (message is the offending key path).
ProblemConfig load_problem(std::string_view text);
ProblemConfig load_problem_file(const std::filesystem::path& path);

struct RunOverrides {
  std::optional<std::filesystem::path> out;
  std::optional<double> tol;
  std::optional<int> threads;
};

/// Runs one task and returns the written files. Files are written through a
/// temporary and renamed; on failure nothing from this run is left behind.
std::vector<std::filesystem::path> run(const ProblemConfig& cfg, std::string_view task, const RunOverrides& ov = {});

/// Process exit code for an exception escaping load_problem or run:
/// 2 for config errors, 3 for numerical failures.
int exit_code_for(const std::exception& e);

}  // namespace cs
