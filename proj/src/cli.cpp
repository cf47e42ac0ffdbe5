#include <fmt/format.h>

#include <fstream>
#include <system_error>

#include "conespectra/config.hpp"
#include "conespectra/error.hpp"
#include "conespectra/report.hpp"

namespace cs {

namespace {

namespace fs = std::filesystem;

struct Artifact {
  std::string name;
  std::string content;
};

[[noreturn]] void missing_task(std::string_view task) {
  throw Error(ErrorKind::SchemaViolation, fmt::format("tasks.{}: not configured", task));
}

const DomainDecl& decl(const ProblemConfig& cfg, const std::string& name) { return cfg.domains.at(name); }

Json header(std::string_view task) { return Json{{"schema", kSchema}, {"task", task}}; }

std::string side_name(Side s) { return s == Side::Left ? "left" : "right"; }

std::vector<Artifact> spectrum_task(const ProblemConfig& cfg, double tol, int threads) {
  if (!cfg.spectrum) missing_task("spectrum");
  const auto& t = *cfg.spectrum;
  const ConeOperator1D op = cfg.op.build();
  const int d = static_cast<int>(op.singular_sides().size());
  const DomainSpec D = decl(cfg, t.domain).resolve(d, t.domain);
  const ScanOptions opt{threads, 1e-10, tol};
  const KernelMap Z = kernel_map(op);
  Json j = header("spectrum");
  j["domain"] = t.domain;
  SpectrumScan scan;
  if (t.rect) {
    scan = spectrum_scan(Z, D, *t.rect, opt);
    j["region"] = Json{{"rect", {{"lo", to_json(t.rect->lo)}, {"hi", to_json(t.rect->hi)}, {"nx", t.rect->nx}, {"ny", t.rect->ny}}}};
  } else {
    scan = spectrum_scan(Z, D, *t.ray, opt);
    j["region"] = Json{{"ray", {{"direction", to_json(t.ray->direction / std::abs(t.ray->direction))},
                                {"r0", t.ray->r0}, {"r1", t.ray->r1}, {"samples", t.ray->samples}}}};
  }
  j["scan"] = to_json(scan);
  std::vector<SpectralVerdict> verdicts;
  if (scan.verdict == SpectrumScan::Verdict::Roots) {
    const IndexData idx = indices(op);
    for (cplx r : scan.roots) verdicts.push_back(classify(op, D, r, tol, idx));
  }
  j["verdicts"] = to_json(verdicts);
  return {{"spectrum.json", dump(j)}};
}

std::vector<Artifact> ray_check_task(const ProblemConfig& cfg) {
  if (!cfg.ray_check) missing_task("ray-check");
  const auto& t = *cfg.ray_check;
  const ConeOperator1D op = cfg.op.build();
  const ConeOperator1D model = op.is_half_line() ? op : wedge_model(op, t.side);
  const EmaxBasis E = emax_basis(model);
  const DomainSpec D = decl(cfg, t.domain).resolve(E.d, t.domain);
  const auto rep = minimal_growth_check(model, E, D, t.lambda_hat, linspace(0.0, t.xi_max, t.samples), t.floor);
  Json j = header("ray-check");
  j["domain"] = t.domain;
  if (!op.is_half_line()) j["side"] = side_name(t.side);
  j["report"] = to_json(rep);
  return {{"ray.csv", orbit_csv(rep.delta_samples, rep.norm_samples)}, {"ray.json", dump(j)}};
}

std::vector<Artifact> selfadjoint_task(const ProblemConfig& cfg) {
  if (!cfg.selfadjoint) missing_task("selfadjoint");
  const ConeOperator1D op = cfg.op.build();
  const SelfAdjointTools sa(op);
  Json list = Json::array();
  for (const auto& name : cfg.selfadjoint->domains) {
    const DomainSpec D = decl(cfg, name).resolve(sa.emax().d, name);
    const DomainSpec Dstar = adjoint_domain(sa.pairing(), D);
    const DomainSpec back = preadjoint_domain(sa.pairing(), Dstar);
    double involution = 1.0;
    if (back.W.dim() == D.W.dim()) {
      const auto ang = principal_angles(back.W, D.W);
      involution = ang.empty() ? 0.0 : std::sin(ang.back());
    }
    Json e{{"domain", name}, {"selfadjoint", sa.is_selfadjoint(D)}, {"adjoint_dim", Dstar.W.dim()},
           {"involution_error", involution}};
    try {
      e["chart_constraint"] = sa.chart_constraint(D);
    } catch (const Error& err) {
      if (err.kind() != ErrorKind::OutsideChart) throw;
      e["chart_constraint"] = nullptr;
    }
    list.push_back(std::move(e));
  }
  Json j = header("selfadjoint");
  j["domains"] = std::move(list);
  return {{"sa.json", dump(j)}};
}

std::vector<Artifact> resolvent_task(const ProblemConfig& cfg) {
  if (!cfg.resolvent) missing_task("resolvent");
  const auto& t = *cfg.resolvent;
  const ConeOperator1D op = cfg.op.build();
  const EmaxBasis E = emax_basis(op);
  const DomainSpec D = decl(cfg, t.domain).resolve(E.d, t.domain);
  const ExpPoly f = t.rhs;
  const auto u = assemble_resolvent(op, E, D, t.lambda, [f](double x) { return f(x); });
  return {{"resolvent.csv", function_csv(u)}};
}

std::vector<Artifact> indices_task(const ProblemConfig& cfg) {
  if (!cfg.indices) missing_task("indices");
  const ConeOperator1D op = cfg.op.build();
  Json j = header("indices");
  const IndexData idx = indices(op);
  const Json idx_json = to_json(idx);
  for (const auto& [k, v] : idx_json.items()) j[k] = v;
  Json sectors = Json::array();
  auto add = [&](const ConeOperator1D& model, const std::string& side) {
    const auto sec = sector_indices(model);
    const cplx p = model.p_at(0.0);
    for (std::size_t i = 0; i < sec.size(); ++i) {
      Json s{{"side", side}, {"sector", i == 0 ? "Im(lambda/p) > 0" : "Im(lambda/p) < 0"}, {"p", to_json(p)}};
      const Json sj = to_json(sec[i]);
      for (const auto& [k, v] : sj.items()) s[k] = v;
      sectors.push_back(std::move(s));
    }
  };
  if (op.is_half_line()) {
    add(op, "left");
  } else {
    for (Side s : op.singular_sides()) add(wedge_model(op, s), side_name(s));
  }
  j["sectors"] = std::move(sectors);
  return {{"indices.json", dump(j)}};
}

void write_all(const fs::path& dir, const std::vector<Artifact>& arts, std::vector<fs::path>& written) {
  fs::create_directories(dir);
  std::vector<fs::path> temps;
  try {
    for (const auto& a : arts) {
      const fs::path tmp = dir / (a.name + ".tmp");
      temps.push_back(tmp);
      std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
      out << a.content;
      out.close();
      if (!out) throw std::runtime_error("cannot write " + tmp.string());
    }
    for (std::size_t i = 0; i < arts.size(); ++i) {
      const fs::path dst = dir / arts[i].name;
      fs::rename(temps[i], dst);
      written.push_back(dst);
    }
  } catch (...) {
    std::error_code ec;
    for (const auto& p : temps) fs::remove(p, ec);
    for (const auto& p : written) fs::remove(p, ec);
    throw;
  }
}

}  // namespace

std::vector<fs::path> run(const ProblemConfig& cfg, std::string_view task, const RunOverrides& ov) {
  const double tol = ov.tol.value_or(cfg.tol);
  if (!(tol > 0.0)) throw Error(ErrorKind::SchemaViolation, "tol: must be positive");
  const int threads = resolve_threads(ov.threads.value_or(cfg.threads));
  const fs::path dir = ov.out.value_or(fs::path(cfg.output));

  std::vector<Artifact> arts;
  if (task == "spectrum") arts = spectrum_task(cfg, tol, threads);
  else if (task == "ray-check") arts = ray_check_task(cfg);
  else if (task == "selfadjoint") arts = selfadjoint_task(cfg);
  else if (task == "resolvent") arts = resolvent_task(cfg);
  else if (task == "indices") arts = indices_task(cfg);
  else throw Error(ErrorKind::SchemaViolation, fmt::format("tasks.{}: unknown task", task));

  std::vector<fs::path> written;
  write_all(dir, arts, written);
  return written;
}

int exit_code_for(const std::exception& e) {
  if (const auto* err = dynamic_cast<const Error*>(&e)) {
    if (err->kind() == ErrorKind::ConfigParse || err->kind() == ErrorKind::SchemaViolation) return 2;
    return 3;
  }
  return 1;
}

}  // namespace cs
