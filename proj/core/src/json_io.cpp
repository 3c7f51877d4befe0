#include "declab/json_io.hpp"

#include <string>

#include "declab/errors.hpp"

namespace declab {

namespace {

const json& field(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw DomainError(std::string("JSON: missing field '") + key + "'");
  return j.at(key);
}

Vec vec(const json& j, std::size_t d, const char* what) {
  if (!j.is_array() || j.size() != d) throw DomainError(std::string("JSON: '") + what + "' must have " + std::to_string(d) + " entries");
  Vec v;
  v.reserve(d);
  for (const auto& x : j) v.push_back(x.get<double>());
  return v;
}

json vec_json(std::span<const double> v) { return json(std::vector<double>(v.begin(), v.end())); }

}  // namespace

json to_json(const Path& u) {
  json j;
  const std::size_t d = dim(u);
  j["dim"] = d;
  json pts = json::array();
  if (const auto* s = std::get_if<StepPath>(&u)) {
    j["kind"] = "step";
    j["u0"] = vec_json(s->state(0));
    for (std::size_t k = 0; k < s->jump_count(); ++k) pts.push_back({{"t", s->times()[k]}, {"v", vec_json(s->state(k + 1))}});
  } else {
    const auto& p = std::get<PolylinePath>(u);
    j["kind"] = "polyline";
    j["u0"] = vec_json(p.point(0));
    for (std::size_t k = 0; k < p.point_count(); ++k) pts.push_back({{"t", p.times()[k]}, {"v", vec_json(p.point(k))}});
  }
  j["points"] = std::move(pts);
  return j;
}

Path path_from_json(const json& j) {
  const auto d = field(j, "dim").get<std::size_t>();
  if (d == 0) throw DomainError("JSON: dim must be positive");
  const auto kind = field(j, "kind").get<std::string>();
  Vec u0 = vec(field(j, "u0"), d, "u0");
  const json& pts = field(j, "points");
  if (!pts.is_array()) throw DomainError("JSON: 'points' must be an array");
  std::vector<double> times, flat;
  if (kind == "step") flat = u0;
  for (const auto& p : pts) {
    times.push_back(field(p, "t").get<double>());
    Vec v = vec(field(p, "v"), d, "v");
    flat.insert(flat.end(), v.begin(), v.end());
  }
  if (kind == "step") return StepPath(d, std::move(times), std::move(flat));
  if (kind == "polyline") {
    if (flat.size() < d || !std::equal(u0.begin(), u0.end(), flat.begin()))
      throw DomainError("JSON: polyline u0 must equal the first breakpoint value");
    return PolylinePath(d, std::move(times), std::move(flat));
  }
  throw DomainError("JSON: unknown path kind '" + kind + "'");
}

json to_json(const Decorated& x) {
  json j = to_json(x.u());
  json exc = json::array();
  for (std::size_t k = 0; k < x.S().size(); ++k) exc.push_back({{"t", x.S()[k]}, {"path", to_json(x.excursions()[k])}});
  j["excursions"] = std::move(exc);
  return j;
}

Decorated decorated_from_json(const json& j) {
  Path u = path_from_json(j);
  std::vector<double> S;
  std::vector<Path> exc;
  if (j.contains("excursions")) {
    for (const auto& e : j.at("excursions")) {
      S.push_back(field(e, "t").get<double>());
      exc.push_back(path_from_json(field(e, "path")));
    }
  }
  return Decorated(std::move(u), std::move(S), std::move(exc));
}

json to_json(const ProfileSet& p) {
  json j = json::array();
  for (const auto& prof : p.profiles()) j.push_back({{"omega", prof.direction()}, {"path", to_json(prof.path())}});
  return j;
}

ProfileSet profiles_from_json(const json& j) {
  if (!j.is_array()) throw DomainError("JSON: profiles must be an array");
  std::vector<Profile> out;
  for (const auto& e : j) {
    Profile p(path_from_json(field(e, "path")));
    if (e.contains("omega")) {
      Vec w = vec(e.at("omega"), p.dim(), "omega");
      for (std::size_t i = 0; i < w.size(); ++i)
        if (std::abs(w[i] - p.direction()[i]) > 1e-12) throw DomainError("JSON: profile omega differs from path(1)");
    }
    out.push_back(std::move(p));
  }
  return ProfileSet(std::move(out));
}

json to_json(const SpectralMeasure& nu) {
  json atoms = json::array();
  for (const auto& a : nu.atoms()) atoms.push_back({{"omega", a.omega}, {"weight", a.weight}});
  return {{"atoms", atoms}};
}

SpectralMeasure spectral_from_json(const json& j) {
  const json& atoms = field(j, "atoms");
  if (!atoms.is_array() || atoms.empty()) throw DomainError("JSON: 'atoms' must be a nonempty array");
  std::vector<SpectralAtom> out;
  for (const auto& a : atoms) {
    const json& w = field(a, "omega");
    out.push_back({vec(w, w.size(), "omega"), field(a, "weight").get<double>()});
  }
  return SpectralMeasure(std::move(out));
}

json to_json(const LevyPath& L) {
  json jumps = json::array();
  for (const auto& jp : L.jumps) jumps.push_back({{"t", jp.t}, {"size", jp.size}, {"dir", jp.dir}});
  return {{"alpha", L.alpha},         {"nu", to_json(L.nu)},
          {"threshold", L.threshold}, {"grid", L.grid},
          {"jumps", std::move(jumps)}, {"continuous", to_json(L.continuous)},
          {"realized", to_json(L.realized)}, {"tail_variance", L.tail_variance}};
}

LevyPath levy_from_json(const json& j) {
  std::vector<LevyJump> jumps;
  for (const auto& jp : field(j, "jumps"))
    jumps.push_back({field(jp, "t").get<double>(), field(jp, "size").get<double>(), field(jp, "dir").get<std::size_t>()});
  auto as_step = [](Path p, const char* what) {
    if (!is_step(p)) throw DomainError(std::string("JSON: '") + what + "' must be a step path");
    return std::get<StepPath>(std::move(p));
  };
  LevyPath L{field(j, "alpha").get<double>(),
             spectral_from_json(field(j, "nu")),
             field(j, "threshold").get<double>(),
             std::move(jumps),
             field(j, "grid").get<std::size_t>(),
             as_step(path_from_json(field(j, "continuous")), "continuous"),
             as_step(path_from_json(field(j, "realized")), "realized"),
             j.value("tail_variance", 0.0)};
  for (const auto& jp : L.jumps)
    if (jp.dir >= L.nu.size()) throw DomainError("JSON: jump direction index out of range");
  return L;
}

json to_json(const MetricResult& r) {
  return {{"value", r.value}, {"error_bound", r.error_bound}, {"method", to_string(r.method)}};
}

}  // namespace declab
