#include <gtest/gtest.h>

#include <cstdlib>
#include <fstream>
#include <numbers>
#include <sstream>

#include <json.hpp>

#include "conespectra/config.hpp"
#include "conespectra/error.hpp"

using namespace cs;
namespace fs = std::filesystem;

namespace {

const char* kGkm = R"({
  "schema": "cone-spectra/1",
  "operator": {"preset": "gkm-example", "rho": 1.0},
  "domains": {"d11": {"alpha": [1, 1]}, "w": {"matrix": [[1], [[0, 1]]]}},
  "tasks": {
    "spectrum": {"domain": "d11", "ray": "real+", "r0": 0.5, "r1": 20, "samples": 256},
    "resolvent": {"domain": "d11", "lambda": [0.3, 1]},
    "indices": {}
  }
})";

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no cs::Error thrown";
  return ErrorKind::NumericalBreakdown;
}

std::string message_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.what();
  }
  return {};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("cs_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

int run_binary(const std::string& args) {
  const int status = std::system((std::string(CONE_SPECTRA_BIN) + " " + args + " >/dev/null 2>&1").c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST(LoadProblem, PresetExample) {
  const auto cfg = load_problem(kGkm);
  EXPECT_EQ(cfg.op.preset, "gkm-example");
  EXPECT_EQ(cfg.op.rho, 1.0);
  EXPECT_EQ(cfg.domains.size(), 2u);
  ASSERT_TRUE(cfg.spectrum && cfg.spectrum->ray);
  EXPECT_EQ(cfg.spectrum->ray->samples, 256);
  EXPECT_FALSE(cfg.ray_check);
  EXPECT_EQ(cfg.tol, 1e-8);
}

TEST(LoadProblem, PiLiteral) {
  for (const char* lit : {"\"π\"", "\"pi\""}) {
    const auto cfg = load_problem(std::string(R"({"schema": "cone-spectra/1", "operator": {"preset": "gkm-example", "rho": )") +
                                  lit + "}}");
    EXPECT_EQ(cfg.op.rho, std::numbers::pi);
  }
}

TEST(LoadProblem, MissingOperator) {
  const auto f = [] { load_problem(R"({"schema": "cone-spectra/1"})"); };
  EXPECT_EQ(kind_of(f), ErrorKind::SchemaViolation);
  EXPECT_EQ(message_of(f), "SchemaViolation: operator");
}

TEST(LoadProblem, Rejections) {
  auto sv = [](const std::string& text) { return kind_of([&] { load_problem(text); }); };
  const std::string head = R"({"schema": "cone-spectra/1", "operator": {"preset": "momentum"})";
  EXPECT_EQ(sv(head + R"(, "extra": 1})"), ErrorKind::SchemaViolation);
  EXPECT_EQ(sv(R"({"schema": "cone-spectra/2", "operator": {"preset": "momentum"}})"), ErrorKind::SchemaViolation);
  EXPECT_EQ(sv(head + R"(, "tol": -1})"), ErrorKind::SchemaViolation);
  EXPECT_EQ(sv(head + R"(, "tasks": {"spectrum": {"domain": "nope"}}})"), ErrorKind::SchemaViolation);
  EXPECT_EQ(sv(head + R"(, "tasks": {"heat": {}}})"), ErrorKind::SchemaViolation);
  EXPECT_EQ(sv(R"({"schema": "cone-spectra/1", "operator": {"preset": "nope"}})"), ErrorKind::SchemaViolation);
  EXPECT_EQ(sv(head + R"(, "domains": {"a": {"alpha": [1, 1], "matrix": [[1]]}}})"), ErrorKind::SchemaViolation);
  EXPECT_EQ(message_of([&] { load_problem(head + R"(, "domains": {"a": {"alhpa": [1, 1]}}})"); }),
            "SchemaViolation: domains.a.alhpa: unknown key");
}

TEST(LoadProblem, ParseErrorCarriesLine) {
  const auto f = [] { load_problem("{\n  \"schema\": \"cone-spectra/1\",\n  \"operator\": {,}\n}"); };
  EXPECT_EQ(kind_of(f), ErrorKind::ConfigParse);
  EXPECT_NE(message_of(f).find("line 3"), std::string::npos) << message_of(f);
}

TEST(LoadProblem, ExplicitOperators) {
  const auto cfg = load_problem(R"({"schema": "cone-spectra/1",
    "operator": {"geometry": "interval", "a": -1, "b": 1, "p": [{"c": 1, "beta": [0, -1]}]}})");
  const auto ref = load_problem(R"({"schema": "cone-spectra/1", "operator": {"preset": "gkm-example"}})");
  for (double x : {-0.7, 0.1, 0.9}) EXPECT_EQ(cfg.op.build().p_at(x), ref.op.build().p_at(x));
  const auto hl = load_problem(R"({"schema": "cone-spectra/1", "operator": {"geometry": "half_line", "p": [1, 2]}})");
  EXPECT_TRUE(hl.op.build().is_half_line());
  EXPECT_EQ(hl.op.build().p_at(0.0), cplx(1.0, 2.0));
}

TEST(Run, IndicesOnGkmExample) {
  const auto dir = scratch("indices");
  const auto files = run(load_problem(kGkm), "indices", {dir});
  ASSERT_EQ(files.size(), 1u);
  const auto j = nlohmann::json::parse(slurp(dir / "indices.json"));
  EXPECT_EQ(j["d"], 2);
  EXPECT_EQ(j["d_prime"], 1);
  EXPECT_EQ(j["d_dprime"], 1);
  EXPECT_EQ(j["index_min"], -1);
  EXPECT_EQ(j["index_max"], 1);
  EXPECT_EQ(j["sectors"].size(), 4u);
}

TEST(Run, SpectrumOnRealRay) {
  const auto dir = scratch("spectrum");
  run(load_problem(kGkm), "spectrum", {dir});
  const auto j = nlohmann::json::parse(slurp(dir / "spectrum.json"));
  const auto& roots = j["scan"]["roots"];
  const double step = std::numbers::pi / (2.0 * std::sin(1.0));
  // (2k + 1) step in [0.5, 20]: k = 0..4.
  ASSERT_EQ(roots.size(), 5u);
  for (std::size_t k = 0; k < roots.size(); ++k) {
    EXPECT_NEAR(roots[k]["lambda"][0].get<double>(), (2.0 * k + 1.0) * step, 1e-8 * step * (2 * k + 1));
    EXPECT_EQ(j["verdicts"][k]["classification"], "EigenvalueOfD");
  }
}

TEST(Run, RayCheckInvariantModelDomain) {
  const auto dir = scratch("ray");
  const auto cfg = load_problem(R"({"schema": "cone-spectra/1", "operator": {"preset": "gkm-model"},
    "domains": {"min": "min"}, "tasks": {"ray-check": {"domain": "min", "lambda_hat": [0, 1]}}})");
  const auto files = run(cfg, "ray-check", {dir});
  EXPECT_EQ(files.size(), 2u);
  const auto j = nlohmann::json::parse(slurp(dir / "ray.json"));
  EXPECT_EQ(j["report"]["verdict"], "SectorOfMinimalGrowth");
  EXPECT_EQ(slurp(dir / "ray.csv").substr(0, 19), "xi,delta,proj_norm\n");
}

TEST(Run, SelfAdjointFlags) {
  const auto dir = scratch("sa");
  const auto cfg = load_problem(R"({"schema": "cone-spectra/1", "operator": {"preset": "momentum"},
    "domains": {"a": {"alpha": [1, [0, 1]]}, "b": {"alpha": [1, 2]}}, "tasks": {"selfadjoint": {}}})");
  run(cfg, "selfadjoint", {dir});
  const auto j = nlohmann::json::parse(slurp(dir / "sa.json"));
  EXPECT_EQ(j["domains"][0]["selfadjoint"], true);
  EXPECT_EQ(j["domains"][1]["selfadjoint"], false);
  EXPECT_LT(j["domains"][0]["involution_error"].get<double>(), 1e-9);
}

TEST(Run, ResolventCsvShape) {
  const auto dir = scratch("resolvent");
  run(load_problem(kGkm), "resolvent", {dir});
  std::istringstream in(slurp(dir / "resolvent.csv"));
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "x,re,im");
  int rows = 0;
  while (std::getline(in, line)) {
    EXPECT_EQ(std::count(line.begin(), line.end(), ','), 2);
    ++rows;
  }
  EXPECT_GT(rows, 50);
}

TEST(Run, DeterministicAcrossRunsAndThreads) {
  const auto cfg = load_problem(kGkm);
  const auto a = scratch("det_a"), b = scratch("det_b");
  run(cfg, "spectrum", {a, std::nullopt, 1});
  run(cfg, "spectrum", {b, std::nullopt, 4});
  EXPECT_EQ(slurp(a / "spectrum.json"), slurp(b / "spectrum.json"));
  run(cfg, "resolvent", {a});
  run(cfg, "resolvent", {b});
  EXPECT_EQ(slurp(a / "resolvent.csv"), slurp(b / "resolvent.csv"));
}

TEST(Run, FailureLeavesNoFiles) {
  const auto dir = scratch("fail");
  const auto cfg = load_problem(R"({"schema": "cone-spectra/1", "operator": {"preset": "gkm-example"},
    "domains": {"d": {"alpha": [1, 1]}}, "tasks": {"selfadjoint": {}}})");
  EXPECT_EQ(kind_of([&] { run(cfg, "selfadjoint", {dir}); }), ErrorKind::NotSymmetric);
  EXPECT_TRUE(fs::is_empty(dir));
  EXPECT_EQ(kind_of([&] { run(cfg, "spectrum", {dir}); }), ErrorKind::SchemaViolation);
}

TEST(Binary, ExitCodes) {
  const auto dir = scratch("bin");
  auto write = [&](const std::string& name, const std::string& text) {
    std::ofstream(dir / name) << text;
    return (dir / name).string();
  };
  const auto good = write("good.json", kGkm);
  EXPECT_EQ(run_binary(good + " --task indices --out " + (dir / "o").string()), 0);
  EXPECT_TRUE(fs::exists(dir / "o" / "indices.json"));
  EXPECT_EQ(run_binary(good + " --task heat --out " + (dir / "o").string()), 2);
  EXPECT_EQ(run_binary(write("bad.json", "{\"schema\": ") + " --task indices"), 2);
  EXPECT_EQ(run_binary((dir / "missing.json").string() + " --task indices"), 2);
  EXPECT_EQ(run_binary(good), 2);  // --task is required
  const auto sym = write("sym.json", R"({"schema": "cone-spectra/1", "operator": {"preset": "gkm-example"},
    "domains": {"d": {"alpha": [1, 1]}}, "tasks": {"selfadjoint": {}}})");
  EXPECT_EQ(run_binary(sym + " --task selfadjoint --out " + (dir / "s").string()), 3);
  EXPECT_FALSE(fs::exists(dir / "s" / "sa.json"));
}
