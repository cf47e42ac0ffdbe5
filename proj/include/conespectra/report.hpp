#pragma once

#include <string>

#include <json.hpp>

#include "conespectra/cone1d.hpp"
#include "conespectra/spectra.hpp"

namespace cs {

using Json = nlohmann::ordered_json;

/// Complex numbers serialize as [re, im].
Json to_json(cplx z);
Json to_json(const SpectralVerdict& v);
Json to_json(const std::vector<SpectralVerdict>& vs);
Json to_json(const SpectrumScan& s);
Json to_json(const MinimalGrowthReport& r);
Json to_json(const IndexData& idx);

/// Pretty JSON with a trailing newline.
std::string dump(const Json& j);

/// Formats a double with 17 significant digits.
std::string fmt17(double v);

/// CSV with header xi,delta,proj_norm. The two sample sets must share their xi grid.
std::string orbit_csv(const OrbitSamples& delta, const OrbitSamples& proj_norm);

/// CSV with header x,re,im at the grid nodes.
std::string function_csv(const SampledFunction& u);

}  // namespace cs
