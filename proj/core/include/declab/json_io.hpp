#pragma once

// JSON encodings of the library's value types. Doubles are written with 17
// significant digits, so parse(dump(x)) == x bit for bit.
//
// Path:       {"dim": d, "u0": [...], "kind": "step"|"polyline",
//              "points": [{"t": ..., "v": [...]}, ...]}
//             step points are the jumps (post-jump values); polyline points
//             are all breakpoints, including t = 0 and t = 1.
// Decorated:  Path fields plus "excursions": [{"t": ..., "path": Path}, ...]
// Profiles:   [{"omega": [...], "path": Path}, ...]
// Spectral:   {"atoms": [{"omega": [...], "weight": ...}, ...]}

#include <nlohmann/json.hpp>

#include "declab/fprime.hpp"
#include "declab/metrics.hpp"
#include "declab/paths.hpp"
#include "declab/stable.hpp"

namespace declab {

using nlohmann::json;

json to_json(const Path& u);
Path path_from_json(const json& j);

json to_json(const Decorated& x);
Decorated decorated_from_json(const json& j);

json to_json(const ProfileSet& p);
ProfileSet profiles_from_json(const json& j);

json to_json(const SpectralMeasure& nu);
SpectralMeasure spectral_from_json(const json& j);

json to_json(const LevyPath& L);
LevyPath levy_from_json(const json& j);

json to_json(const MetricResult& r);

}  // namespace declab
