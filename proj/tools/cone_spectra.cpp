#include <CLI11.hpp>
#include <fmt/format.h>

#include <cstdio>

#include "conespectra/config.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Spectra and resolvents of closed extensions of 1-D cone operators"};
  std::string config_path, task, out;
  double tol = 0.0;
  int threads = 0;
  app.add_option("config", config_path, "JSON problem file")->required();
  app.add_option("--task", task, "spectrum | ray-check | selfadjoint | resolvent | indices")->required();
  auto* out_opt = app.add_option("--out", out, "output directory (default: config 'output')");
  auto* tol_opt = app.add_option("--tol", tol, "tolerance override")->check(CLI::PositiveNumber);
  auto* thr_opt = app.add_option("--threads", threads, "worker threads (default: CONESPECTRA_THREADS or 1)")
                      ->check(CLI::PositiveNumber);
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    const cs::ProblemConfig cfg = cs::load_problem_file(config_path);
    cs::RunOverrides ov;
    if (*out_opt) ov.out = out;
    if (*tol_opt) ov.tol = tol;
    if (*thr_opt) ov.threads = threads;
    for (const auto& p : cs::run(cfg, task, ov)) fmt::print("{}\n", p.string());
    return 0;
  } catch (const std::exception& e) {
    fmt::print(stderr, "cone-spectra: {}\n", e.what());
    return cs::exit_code_for(e);
  }
}
