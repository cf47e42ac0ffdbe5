#include "conespectra/report.hpp"

#include <fmt/format.h>

#include <cmath>

#include "conespectra/error.hpp"

namespace cs {

namespace {

// JSON has no inf or nan.
Json number(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

}  // namespace

Json to_json(cplx z) { return Json::array({number(z.real()), number(z.imag())}); }

Json to_json(const SpectralVerdict& v) {
  Json j;
  j["lambda"] = to_json(v.lambda);
  j["classification"] = to_string(v.classification);
  j["d_prime_at_lambda"] = v.d_prime_at_lambda;
  j["delta_value"] = number(v.delta_value);
  j["notes"] = v.notes;
  return j;
}

Json to_json(const std::vector<SpectralVerdict>& vs) {
  Json j = Json::array();
  for (const auto& v : vs) j.push_back(to_json(v));
  return j;
}

Json to_json(const SpectrumScan& s) {
  Json j;
  j["verdict"] = to_string(s.verdict);
  j["samples"] = s.samples;
  j["max_normalized"] = number(s.max_normalized);
  Json roots = Json::array();
  for (std::size_t i = 0; i < s.roots.size(); ++i)
    roots.push_back(Json{{"lambda", to_json(s.roots[i])}, {"delta", number(s.root_delta[i])}});
  j["roots"] = std::move(roots);
  return j;
}

Json to_json(const MinimalGrowthReport& r) {
  Json j;
  j["lambda_hat"] = to_json(r.lambda_hat);
  j["verdict"] = to_string(r.verdict);
  j["bound"] = number(r.bound);
  j["reason"] = r.reason;
  double inf_delta = INFINITY;
  for (double v : r.delta_samples.values) inf_delta = std::min(inf_delta, v);
  j["min_delta"] = number(inf_delta);
  j["samples"] = r.delta_samples.xi.size();
  return j;
}

Json to_json(const IndexData& idx) {
  Json j;
  j["d"] = idx.d;
  j["d_prime"] = idx.d_prime;
  j["d_dprime"] = idx.d_dprime;
  j["index_min"] = idx.index_min();
  j["index_max"] = idx.index_max();
  j["probe"] = to_json(idx.probe);
  return j;
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

std::string fmt17(double v) { return fmt::format("{:.17g}", v); }

std::string orbit_csv(const OrbitSamples& delta, const OrbitSamples& proj_norm) {
  if (delta.xi != proj_norm.xi) throw Error(ErrorKind::DimensionMismatch, "orbit samples on different grids");
  std::string out = "xi,delta,proj_norm\n";
  for (std::size_t i = 0; i < delta.xi.size(); ++i)
    out += fmt::format("{},{},{}\n", fmt17(delta.xi[i]), fmt17(delta.values[i]), fmt17(proj_norm.values[i]));
  return out;
}

std::string function_csv(const SampledFunction& u) {
  std::string out = "x,re,im\n";
  for (int i = 0; i < u.grid->size(); ++i)
    out += fmt::format("{},{},{}\n", fmt17(u.grid->x()[i]), fmt17(u.values[i].real()), fmt17(u.values[i].imag()));
  return out;
}

}  // namespace cs
