#include "conespectra/config.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include <json.hpp>

#include "conespectra/error.hpp"

namespace cs {

namespace {

using nlohmann::json;

[[noreturn]] void violation(const std::string& key, const std::string& what = "") {
  throw Error(ErrorKind::SchemaViolation, what.empty() ? key : key + ": " + what);
}

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

void only_keys(const json& obj, const std::string& path, std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) violation(path, "expected an object");
  for (const auto& [k, v] : obj.items())
    if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return k == a; }))
      violation(join(path, k), "unknown key");
}

double real_of(const json& v, const std::string& key) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) {
    const auto s = v.get<std::string>();
    if (s == "pi" || s == "π") return std::numbers::pi;
    if (s == "-pi" || s == "-π") return -std::numbers::pi;
  }
  violation(key, "expected a number");
}

cplx complex_of(const json& v, const std::string& key) {
  if (v.is_array()) {
    if (v.size() != 2) violation(key, "expected [re, im]");
    return {real_of(v[0], key), real_of(v[1], key)};
  }
  return real_of(v, key);
}

double positive(const json& v, const std::string& key) {
  const double x = real_of(v, key);
  if (!(x > 0.0)) violation(key, "must be positive");
  return x;
}

int count_of(const json& v, const std::string& key, int min) {
  if (!v.is_number_integer() || v.get<long>() < min) violation(key, fmt::format("expected an integer >= {}", min));
  return v.get<int>();
}

std::string string_of(const json& v, const std::string& key) {
  if (!v.is_string()) violation(key, "expected a string");
  return v.get<std::string>();
}

// Either a constant or a list of terms {"c", "n", "beta"}.
ExpPoly exppoly_of(const json& v, const std::string& key) {
  if (!v.is_array() || (v.size() == 2 && !v[0].is_object())) return ExpPoly(complex_of(v, key));
  std::vector<ExpTerm> terms;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const std::string k = fmt::format("{}[{}]", key, i);
    only_keys(v[i], k, {"c", "n", "beta"});
    ExpTerm t;
    t.c = v[i].contains("c") ? complex_of(v[i]["c"], join(k, "c")) : 1.0;
    t.n = v[i].contains("n") ? count_of(v[i]["n"], join(k, "n"), 0) : 0;
    t.beta = v[i].contains("beta") ? complex_of(v[i]["beta"], join(k, "beta")) : 0.0;
    terms.push_back(t);
  }
  return ExpPoly(std::move(terms));
}

OperatorDecl operator_of(const json& o) {
  const std::string path = "operator";
  OperatorDecl op;
  if (!o.is_object()) violation(path, "expected an object");
  if (o.contains("preset")) {
    only_keys(o, path, {"preset", "rho"});
    op.preset = string_of(o["preset"], "operator.preset");
    if (op.preset != "gkm-example" && op.preset != "momentum" && op.preset != "gkm-model")
      violation("operator.preset", "unknown preset '" + op.preset + "'");
    if (o.contains("rho")) {
      if (op.preset == "momentum") violation("operator.rho", "momentum takes no rho");
      op.rho = positive(o["rho"], "operator.rho");
    }
    return op;
  }
  if (!o.contains("geometry")) violation("operator.preset", "need a preset or a geometry");
  const std::string g = string_of(o["geometry"], "operator.geometry");
  if (g == "interval") {
    only_keys(o, path, {"geometry", "a", "b", "p", "q"});
    if (o.contains("a")) op.a = real_of(o["a"], "operator.a");
    if (o.contains("b")) op.b = real_of(o["b"], "operator.b");
    if (!(op.b > op.a)) violation("operator.b", "need a < b");
    if (!o.contains("p")) violation("operator.p");
    op.p = exppoly_of(o["p"], "operator.p");
    if (o.contains("q")) op.q = exppoly_of(o["q"], "operator.q");
  } else if (g == "half_line") {
    only_keys(o, path, {"geometry", "p", "q"});
    op.half_line = true;
    if (!o.contains("p")) violation("operator.p");
    op.p0 = complex_of(o["p"], "operator.p");
    if (o.contains("q")) op.q0 = complex_of(o["q"], "operator.q");
  } else {
    violation("operator.geometry", "expected interval or half_line");
  }
  return op;
}

DomainDecl domain_of(const json& v, const std::string& path) {
  DomainDecl d;
  if (v.is_string()) {
    const auto s = v.get<std::string>();
    if (s == "min") d.kind = DomainDecl::Kind::Min;
    else if (s == "max") d.kind = DomainDecl::Kind::Max;
    else violation(path, "expected min, max or an object");
    return d;
  }
  only_keys(v, path, {"alpha", "matrix"});
  if (v.contains("alpha") == v.contains("matrix")) violation(path, "give exactly one of alpha, matrix");
  if (v.contains("alpha")) {
    const auto& a = v["alpha"];
    if (!a.is_array() || a.size() != 2) violation(join(path, "alpha"), "expected [alpha_minus, alpha_plus]");
    d.alpha_minus = complex_of(a[0], join(path, "alpha"));
    d.alpha_plus = complex_of(a[1], join(path, "alpha"));
    return d;
  }
  d.kind = DomainDecl::Kind::Matrix;
  const auto& m = v["matrix"];
  const std::string key = join(path, "matrix");
  if (!m.is_array() || m.empty() || !m[0].is_array()) violation(key, "expected a list of rows");
  const auto cols = m[0].size();
  d.matrix = Mat(static_cast<int>(m.size()), static_cast<int>(cols));
  for (std::size_t r = 0; r < m.size(); ++r) {
    if (!m[r].is_array() || m[r].size() != cols) violation(key, "ragged rows");
    for (std::size_t c = 0; c < cols; ++c) d.matrix(r, c) = complex_of(m[r][c], key);
  }
  return d;
}

std::string domain_ref(const json& t, const std::string& path, const ProblemConfig& cfg) {
  if (!t.contains("domain")) violation(join(path, "domain"));
  auto name = string_of(t["domain"], join(path, "domain"));
  if (!cfg.domains.count(name)) violation(join(path, "domain"), "undefined domain '" + name + "'");
  return name;
}

cplx ray_direction(const json& v, const std::string& key) {
  if (v.is_string()) {
    const auto s = v.get<std::string>();
    if (s == "real+") return 1.0;
    if (s == "real-") return -1.0;
    if (s == "imag+") return cplx(0.0, 1.0);
    if (s == "imag-") return cplx(0.0, -1.0);
    violation(key, "expected real+, real-, imag+, imag- or {\"angle\": x}");
  }
  only_keys(v, key, {"angle"});
  if (!v.contains("angle")) violation(join(key, "angle"));
  return std::polar(1.0, real_of(v["angle"], join(key, "angle")));
}

SpectrumTask spectrum_of(const json& t, const ProblemConfig& cfg) {
  const std::string path = "tasks.spectrum";
  only_keys(t, path, {"domain", "ray", "r0", "r1", "samples", "rect"});
  SpectrumTask s;
  s.domain = domain_ref(t, path, cfg);
  if (t.contains("rect")) {
    if (t.contains("ray") || t.contains("r0") || t.contains("r1") || t.contains("samples"))
      violation(path, "ray parameters given with rect");
    const auto& r = t["rect"];
    const std::string key = join(path, "rect");
    only_keys(r, key, {"lo", "hi", "nx", "ny"});
    if (!r.contains("lo") || !r.contains("hi")) violation(join(key, "lo"), "rect needs lo and hi");
    RectRegion rect{complex_of(r["lo"], join(key, "lo")), complex_of(r["hi"], join(key, "hi"))};
    if (!(rect.hi.real() > rect.lo.real() && rect.hi.imag() > rect.lo.imag())) violation(join(key, "hi"), "empty rect");
    if (r.contains("nx")) rect.nx = count_of(r["nx"], join(key, "nx"), 3);
    if (r.contains("ny")) rect.ny = count_of(r["ny"], join(key, "ny"), 3);
    s.rect = rect;
    return s;
  }
  RayRegion ray;
  if (t.contains("ray")) ray.direction = ray_direction(t["ray"], join(path, "ray"));
  if (t.contains("r0")) ray.r0 = positive(t["r0"], join(path, "r0"));
  if (t.contains("r1")) ray.r1 = positive(t["r1"], join(path, "r1"));
  if (!(ray.r1 > ray.r0)) violation(join(path, "r1"), "need r0 < r1");
  if (t.contains("samples")) ray.samples = count_of(t["samples"], join(path, "samples"), 3);
  s.ray = ray;
  return s;
}

RayCheckTask ray_check_of(const json& t, const ProblemConfig& cfg) {
  const std::string path = "tasks.ray-check";
  only_keys(t, path, {"domain", "lambda_hat", "side", "xi_max", "samples", "floor"});
  RayCheckTask r;
  r.domain = domain_ref(t, path, cfg);
  if (t.contains("lambda_hat")) {
    r.lambda_hat = complex_of(t["lambda_hat"], join(path, "lambda_hat"));
    if (r.lambda_hat == cplx{}) violation(join(path, "lambda_hat"), "must be nonzero");
  }
  if (t.contains("side")) {
    const auto s = string_of(t["side"], join(path, "side"));
    if (s == "left") r.side = Side::Left;
    else if (s == "right") r.side = Side::Right;
    else violation(join(path, "side"), "expected left or right");
  }
  if (t.contains("xi_max")) r.xi_max = positive(t["xi_max"], join(path, "xi_max"));
  if (t.contains("samples")) r.samples = count_of(t["samples"], join(path, "samples"), 3);
  if (t.contains("floor")) r.floor = positive(t["floor"], join(path, "floor"));
  return r;
}

SelfAdjointTask selfadjoint_of(const json& t, const ProblemConfig& cfg) {
  const std::string path = "tasks.selfadjoint";
  only_keys(t, path, {"domains"});
  SelfAdjointTask s;
  if (!t.contains("domains")) {
    for (const auto& [name, d] : cfg.domains) s.domains.push_back(name);
    return s;
  }
  const auto& list = t["domains"];
  if (!list.is_array()) violation(join(path, "domains"), "expected a list");
  for (const auto& v : list) {
    auto name = string_of(v, join(path, "domains"));
    if (!cfg.domains.count(name)) violation(join(path, "domains"), "undefined domain '" + name + "'");
    s.domains.push_back(std::move(name));
  }
  return s;
}

ResolventTask resolvent_of(const json& t, const ProblemConfig& cfg) {
  const std::string path = "tasks.resolvent";
  only_keys(t, path, {"domain", "lambda", "rhs"});
  ResolventTask r;
  r.domain = domain_ref(t, path, cfg);
  if (t.contains("lambda")) r.lambda = complex_of(t["lambda"], join(path, "lambda"));
  if (t.contains("rhs")) r.rhs = exppoly_of(t["rhs"], join(path, "rhs"));
  return r;
}

int line_of(std::string_view text, std::size_t byte) {
  byte = std::min(byte, text.size());
  return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<long>(byte), '\n'));
}

}  // namespace

ConeOperator1D OperatorDecl::build() const {
  if (preset == "gkm-example") return ConeOperator1D::interval(-1.0, 1.0, ExpPoly::exponential(1.0, cplx(0.0, -rho)));
  if (preset == "momentum") return ConeOperator1D::interval(-1.0, 1.0, ExpPoly(1.0));
  if (preset == "gkm-model")
    return wedge_model(ConeOperator1D::interval(-1.0, 1.0, ExpPoly::exponential(1.0, cplx(0.0, -rho))), Side::Left);
  if (half_line) return ConeOperator1D::half_line(p0, q0);
  return ConeOperator1D::interval(a, b, p, q);
}

DomainSpec DomainDecl::resolve(int d, const std::string& name) const {
  const std::string key = "domains." + name;
  DomainSpec D;
  switch (kind) {
    case Kind::Min: D = minimal_domain(d); break;
    case Kind::Max: D = maximal_domain(d); break;
    case Kind::Alpha:
      if (d != 2) violation(key, fmt::format("alpha form needs dim E_max = 2, have {}", d));
      D = domain_from_alpha(alpha_minus, alpha_plus);
      break;
    case Kind::Matrix:
      if (matrix.rows() != d) violation(key, fmt::format("matrix needs {} rows", d));
      try {
        D.W = orthonormalize(matrix);
      } catch (const Error&) {
        violation(key, "columns are linearly dependent");
      }
      break;
  }
  D.label = name;
  return D;
}

ProblemConfig load_problem(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    std::string msg = e.what();
    if (const auto p = msg.find("parse error"); p != std::string::npos) msg = msg.substr(p);
    throw Error(ErrorKind::ConfigParse, fmt::format("line {}: {}", line_of(text, e.byte), msg));
  }
  only_keys(doc, "", {"schema", "operator", "domains", "tasks", "tol", "threads", "output"});
  if (!doc.contains("schema")) violation("schema");
  if (string_of(doc["schema"], "schema") != kSchema) violation("schema", fmt::format("expected \"{}\"", kSchema));
  if (!doc.contains("operator")) violation("operator");

  ProblemConfig cfg;
  cfg.op = operator_of(doc["operator"]);
  if (doc.contains("domains")) {
    const auto& ds = doc["domains"];
    if (!ds.is_object()) violation("domains", "expected an object");
    for (const auto& [name, v] : ds.items()) cfg.domains.emplace(name, domain_of(v, "domains." + name));
  }
  if (doc.contains("tol")) cfg.tol = positive(doc["tol"], "tol");
  if (doc.contains("threads")) cfg.threads = count_of(doc["threads"], "threads", 0);
  if (doc.contains("output")) cfg.output = string_of(doc["output"], "output");
  if (doc.contains("tasks")) {
    const auto& t = doc["tasks"];
    only_keys(t, "tasks", {"spectrum", "ray-check", "selfadjoint", "resolvent", "indices"});
    if (t.contains("spectrum")) cfg.spectrum = spectrum_of(t["spectrum"], cfg);
    if (t.contains("ray-check")) cfg.ray_check = ray_check_of(t["ray-check"], cfg);
    if (t.contains("selfadjoint")) cfg.selfadjoint = selfadjoint_of(t["selfadjoint"], cfg);
    if (t.contains("resolvent")) cfg.resolvent = resolvent_of(t["resolvent"], cfg);
    if (t.contains("indices")) {
      only_keys(t["indices"], "tasks.indices", {});
      cfg.indices = IndicesTask{};
    }
  }
  return cfg;
}

ProblemConfig load_problem_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::ConfigParse, "line 0: cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return load_problem(ss.str());
}

}  // namespace cs
