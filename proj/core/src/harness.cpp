#include "declab/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cerrno>
#include <chrono>
#include <cmath>
#include <cstring>
#include <exception>
#include <fstream>
#include <iterator>
#include <map>
#include <numbers>
#include <set>
#include <sstream>
#include <thread>

#include "declab/cusp.hpp"
#include "declab/dynamics.hpp"
#include "declab/errors.hpp"
#include "declab/json_io.hpp"
#include "declab/stable.hpp"

namespace declab {

namespace {

using nlohmann::json;

const std::vector<std::pair<ExperimentKind, const char*>> kKindNames = {
    {ExperimentKind::MarginalKs, "marginal-ks"},         {ExperimentKind::Overshoot, "overshoot"},
    {ExperimentKind::HypothesisTrend, "hypothesis-trend"}, {ExperimentKind::Lapnumber, "lapnumber"},
    {ExperimentKind::ExcursionShape, "excursion-shape"}, {ExperimentKind::ProfileClassify, "profile-classify"},
    {ExperimentKind::ChfCheck, "chf-check"}};

bool uses_map(ExperimentKind k) { return k != ExperimentKind::ProfileClassify && k != ExperimentKind::ChfCheck; }
bool uses_n(ExperimentKind k) {
  return k == ExperimentKind::MarginalKs || k == ExperimentKind::Overshoot || k == ExperimentKind::HypothesisTrend ||
         k == ExperimentKind::Lapnumber;
}
bool uses_samples(ExperimentKind k) {
  return k == ExperimentKind::MarginalKs || k == ExperimentKind::ExcursionShape || k == ExperimentKind::ChfCheck;
}

std::vector<std::string> allowed_params(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::MarginalKs: return {"reference_samples"};
    case ExperimentKind::Overshoot: return {"quantile"};
    case ExperimentKind::HypothesisTrend: return {};
    case ExperimentKind::Lapnumber: return {};
    case ExperimentKind::ExcursionShape: return {"r_min", "r_max", "head", "normalize"};
    case ExperimentKind::ProfileClassify: return {"beta", "trace_sets", "random_positive", "quadrature"};
    case ExperimentKind::ChfCheck: return {"nu", "s", "s_points", "s_max", "path_samples", "truncation", "grid"};
  }
  return {};
}

// --- typed field access with paths -------------------------------------

std::string sub(const std::string& base, const std::string& key) { return base + "/" + key; }

double get_number(const json& j, const std::string& path) {
  if (!j.is_number()) throw ConfigError(path, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw ConfigError(path, "must be finite");
  return v;
}

std::uint64_t get_uint(const json& j, const std::string& path) {
  if (j.is_number_unsigned()) return j.get<std::uint64_t>();
  if (j.is_number_integer()) {
    if (j.get<std::int64_t>() < 0) throw ConfigError(path, "must be nonnegative");
    return static_cast<std::uint64_t>(j.get<std::int64_t>());
  }
  if (j.is_number_float()) {
    const double v = j.get<double>();
    if (v >= 0 && v == std::floor(v) && v < 1.8e19) return static_cast<std::uint64_t>(v);
  }
  throw ConfigError(path, "expected a nonnegative integer");
}

std::size_t get_positive(const json& j, const std::string& path) {
  const auto v = get_uint(j, path);
  if (v == 0) throw ConfigError(path, "must be positive");
  return static_cast<std::size_t>(v);
}

std::string get_string(const json& j, const std::string& path) {
  if (!j.is_string()) throw ConfigError(path, "expected a string");
  return j.get<std::string>();
}

std::vector<double> get_numbers(const json& j, const std::string& path) {
  if (!j.is_array()) throw ConfigError(path, "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(get_number(j[i], sub(path, std::to_string(i))));
  return out;
}

void check_keys(const json& j, const std::vector<std::string>& allowed, const std::string& path) {
  for (const auto& [key, _] : j.items())
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) throw ConfigError(sub(path, key), "unknown field");
}

// --- parsed kind-specific parameters -------------------------------------

struct TraceSet {
  std::string name;
  CuspData data;
};

CuspData inline_traces(const json& t, double alpha, const std::string& path) {
  CuspData d;
  d.alpha = alpha;
  d.dim = t.contains("dim") ? get_positive(t.at("dim"), sub(path, "dim")) : 1;
  for (const char* key : {"theta", "v_plus", "v_minus"})
    if (!t.contains(key)) throw ConfigError(sub(path, key), "required");
  d.theta = get_numbers(t.at("theta"), sub(path, "theta"));
  d.v_plus = get_numbers(t.at("v_plus"), sub(path, "v_plus"));
  d.v_minus = get_numbers(t.at("v_minus"), sub(path, "v_minus"));
  return d;
}

std::vector<TraceSet> trace_sets(const ExperimentConfig& cfg, const std::filesystem::path& base) {
  const double beta = cfg.params.contains("beta") ? get_number(cfg.params.at("beta"), "/params/beta") : 3.0;
  double alpha = 0.0;
  try {
    alpha = CuspData::alpha_from_beta(beta);
  } catch (const DomainError& e) {
    throw ConfigError("/params/beta", e.what());
  }
  if (!cfg.params.contains("trace_sets")) throw ConfigError("/params/trace_sets", "required");
  const json& sets = cfg.params.at("trace_sets");
  if (!sets.is_array() || sets.empty()) throw ConfigError("/params/trace_sets", "expected a nonempty array");
  std::vector<TraceSet> out;
  for (std::size_t i = 0; i < sets.size(); ++i) {
    const std::string path = "/params/trace_sets/" + std::to_string(i);
    const json& t = sets[i];
    if (!t.is_object()) throw ConfigError(path, "expected an object");
    check_keys(t, {"name", "file", "dim", "theta", "v_plus", "v_minus"}, path);
    if (!t.contains("name")) throw ConfigError(sub(path, "name"), "required");
    TraceSet ts{get_string(t.at("name"), sub(path, "name")), {}};
    try {
      if (t.contains("file")) {
        std::filesystem::path f = get_string(t.at("file"), sub(path, "file"));
        if (f.is_relative()) f = base / f;
        std::ifstream in(f);
        if (!in) throw ConfigError(sub(path, "file"), "cannot open " + f.string() + ": " + std::strerror(errno));
        ts.data = read_cusp_csv(in, alpha);
      } else {
        ts.data = inline_traces(t, alpha, path);
        ts.data.validate();
      }
    } catch (const DomainError& e) {
      throw ConfigError(path, e.what());
    }
    out.push_back(std::move(ts));
  }
  return out;
}

struct ChfParams {
  SpectralMeasure nu;
  std::vector<Vec> s;
  std::size_t path_samples;
  std::size_t truncation;
  std::size_t grid;
};

// Default evaluation points: radii spread over (0, s_max], directions by
// golden-angle rotation in d = 2, alternating signed axes otherwise.
std::vector<Vec> default_s_points(std::size_t d, std::size_t count, double s_max) {
  std::vector<Vec> out;
  const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
  for (std::size_t k = 0; k < count; ++k) {
    const double r = s_max * static_cast<double>(k + 1) / static_cast<double>(count);
    Vec s(d, 0.0);
    if (d == 2) {
      s[0] = r * std::cos(golden * static_cast<double>(k));
      s[1] = r * std::sin(golden * static_cast<double>(k));
    } else {
      s[k % d] = (k % 2 == 0 ? r : -r);
    }
    out.push_back(std::move(s));
  }
  return out;
}

ChfParams chf_params(const ExperimentConfig& cfg) {
  const json& p = cfg.params;
  if (!p.contains("nu")) throw ConfigError("/params/nu", "required");
  std::optional<SpectralMeasure> nu;
  try {
    nu = spectral_from_json(p.at("nu"));
  } catch (const std::exception& e) {
    throw ConfigError("/params/nu", e.what());
  }
  const std::size_t d = nu->dim();
  std::vector<Vec> s;
  if (p.contains("s")) {
    if (!p.at("s").is_array() || p.at("s").empty()) throw ConfigError("/params/s", "expected a nonempty array");
    for (std::size_t i = 0; i < p.at("s").size(); ++i) {
      const std::string path = "/params/s/" + std::to_string(i);
      Vec v = get_numbers(p.at("s")[i], path);
      if (v.size() != d) throw ConfigError(path, "dimension differs from nu");
      s.push_back(std::move(v));
    }
  } else {
    const std::size_t count = p.contains("s_points") ? get_positive(p.at("s_points"), "/params/s_points") : 20;
    const double s_max = p.contains("s_max") ? get_number(p.at("s_max"), "/params/s_max") : 2.0;
    if (!(s_max > 0)) throw ConfigError("/params/s_max", "must be positive");
    s = default_s_points(d, count, s_max);
  }
  return {*nu, std::move(s),
          p.contains("path_samples") ? get_positive(p.at("path_samples"), "/params/path_samples") : 10'000,
          p.contains("truncation") ? get_positive(p.at("truncation"), "/params/truncation") : 1000,
          p.contains("grid") ? get_positive(p.at("grid"), "/params/grid") : 64};
}

struct ShapeParams {
  std::size_t r_min = 10, r_max = 30, head = 1000;
  bool normalize = false;
};

ShapeParams shape_params(const ExperimentConfig& cfg) {
  ShapeParams sp;
  const json& p = cfg.params;
  if (p.contains("r_min")) sp.r_min = get_positive(p.at("r_min"), "/params/r_min");
  if (p.contains("r_max")) sp.r_max = get_positive(p.at("r_max"), "/params/r_max");
  if (p.contains("head")) sp.head = get_positive(p.at("head"), "/params/head");
  if (sp.r_max < sp.r_min) throw ConfigError("/params/r_max", "must be at least r_min");
  if (p.contains("normalize")) {
    const auto v = get_string(p.at("normalize"), "/params/normalize");
    if (v != "none" && v != "R") throw ConfigError("/params/normalize", "expected \"none\" or \"R\"");
    sp.normalize = v == "R";
  }
  if (sp.head > cfg.samples) throw ConfigError("/params/head", "exceeds samples");
  return sp;
}

// --- per-task kernels -------------------------------------------------------

struct Stat {
  std::string name;
  double value;
};

std::vector<Stat> run_lapnumber(const InducedScheme& s, std::size_t n, Rng& rng) {
  const std::size_t N = lap_number(s, s.sample_mu(rng), n);
  std::vector<Stat> out{{"lap_ratio", static_cast<double>(N) / static_cast<double>(n)}};
  if (N > 0) out.push_back({"mean_return", static_cast<double>(n) / static_cast<double>(N)});
  return out;
}

std::vector<Stat> run_marginal_ks(const InducedScheme& s, const ExperimentConfig& cfg, std::size_t n, Rng& rng) {
  const std::size_t ref = cfg.params.contains("reference_samples")
                              ? get_positive(cfg.params.at("reference_samples"), "/params/reference_samples")
                              : 10 * cfg.samples;
  const double bn = s.bn(n);
  std::vector<double> w(cfg.samples), l(ref);
  for (auto& x : w) x = birkhoff_sum(s, s.sample_mu(rng), n)[0] / bn;
  const double scale = *s.levy_scale();
  const SpectralMeasure nu = *s.spectral();
  for (auto& x : l) x = scale * sample_marginal(s.alpha(), nu, rng)[0];
  const KsResult ks = ks_two_sample(std::move(w), std::move(l));
  return {{"ks", ks.statistic}, {"ks_p_value", ks.p_value}};
}

// Span of the partial sums over one excursion relative to |V|, for the
// excursions whose |V| is above the given quantile of one orbit of length n.
std::vector<Stat> run_overshoot(const InducedScheme& s, const ExperimentConfig& cfg, std::size_t n, Rng& rng) {
  const double q = cfg.params.contains("quantile") ? get_number(cfg.params.at("quantile"), "/params/quantile") : 0.9;
  Orbit o = s.sample_muX(rng);
  ExcursionData e;
  std::vector<std::pair<double, double>> rows;  // (|V|, span / |V|)
  std::size_t steps = 0;
  while (steps < n) {
    next_excursion(s, o, e);
    steps += e.R;
    const auto [lo, hi] = std::minmax_element(e.partial.begin(), e.partial.end());
    const double V = std::abs(e.partial.back());
    if (V > 0) rows.emplace_back(V, (*hi - *lo) / V);
  }
  if (rows.empty()) throw DomainError("overshoot: no excursion with nonzero V");
  std::vector<double> sizes;
  for (const auto& r : rows) sizes.push_back(r.first);
  std::sort(sizes.begin(), sizes.end());
  const double cut = sizes[static_cast<std::size_t>(q * static_cast<double>(sizes.size() - 1))];
  std::vector<double> ratios;
  for (const auto& r : rows)
    if (r.first >= cut) ratios.push_back(r.second);
  return {{"span_ratio", median_ci(ratios).median}, {"excursions", static_cast<double>(rows.size())}};
}

std::vector<Stat> run_excursion_shape(const InducedScheme& s, const ExperimentConfig& cfg, Rng& rng) {
  const ShapeParams sp = shape_params(cfg);
  double all = 0.0, head = 0.0;
  std::size_t kept = 0, drawn = 0, extended = 0;
  while (kept < cfg.samples) {
    Orbit o = s.sample_muX_tail(sp.r_min, rng);
    const ExcursionDistance ed = excursion_distance(s, o);
    ++drawn;
    if (ed.R > sp.r_max) continue;
    const double d = sp.normalize ? ed.distance / static_cast<double>(ed.R) : ed.distance;
    all = std::max(all, d);
    if (kept < sp.head) head = std::max(head, d);
    ++kept;
    extended += ed.extended;
  }
  const double n = static_cast<double>(kept);
  return {{"max_distance", all},
          {"head_max_distance", head},
          {"growth_ratio", head > 0 ? all / head : (all > 0 ? INFINITY : 1.0)},
          {"acceptance_rate", n / static_cast<double>(drawn)},
          {"extended_fraction", static_cast<double>(extended) / n}};
}

double mode_code(Mode m) {
  switch (m) {
    case Mode::M1: return 1.0;
    case Mode::M2: return 2.0;
    case Mode::None: return 3.0;
  }
  return 0.0;
}

std::vector<Stat> run_profile_classify(const std::vector<TraceSet>& sets, const ExperimentConfig& cfg, Rng& rng) {
  const std::size_t m = cfg.params.contains("quadrature") ? get_positive(cfg.params.at("quadrature"), "/params/quadrature") : 2048;
  std::vector<Stat> out;
  for (const auto& ts : sets) {
    double code = 0.0;  // 0 marks a degenerate profile
    try {
      code = mode_code(classify_cusp(cusp_profile(ts.data, m)));
    } catch (const DegenerateProfileError&) {
    }
    out.push_back({"mode:" + ts.name, code});
  }
  const std::size_t random = cfg.params.contains("random_positive")
                                 ? static_cast<std::size_t>(get_uint(cfg.params.at("random_positive"), "/params/random_positive"))
                                 : 0;
  if (random > 0) {
    const double alpha = sets.front().data.alpha;
    std::uniform_real_distribution<double> U(0.05, 2.0);
    std::size_t m1 = 0;
    for (std::size_t r = 0; r < random; ++r) {
      CuspData d;
      d.alpha = alpha;
      const std::size_t grid = 33;
      for (std::size_t k = 0; k < grid; ++k) {
        d.theta.push_back(std::numbers::pi * static_cast<double>(k) / static_cast<double>(grid - 1));
        d.v_plus.push_back(U(rng));
        d.v_minus.push_back(U(rng));
      }
      if (classify_cusp(cusp_profile(d, m)) == Mode::M1) ++m1;
    }
    out.push_back({"random_positive_m1_fraction", static_cast<double>(m1) / static_cast<double>(random)});
  }
  return out;
}

std::vector<Stat> run_chf_check(const ChfParams& p, const ExperimentConfig& cfg, Rng& rng) {
  const double alpha = *cfg.alpha;
  const std::size_t d = p.nu.dim(), N = cfg.samples;
  std::vector<double> draws(N * d);
  for (std::size_t k = 0; k < N; ++k) {
    const Vec g = sample_marginal(alpha, p.nu, rng);
    std::copy(g.begin(), g.end(), draws.begin() + static_cast<std::ptrdiff_t>(k * d));
  }
  double max_z = 0.0;
  for (const Vec& s : p.s) {
    double c = 0, c2 = 0, sn = 0, s2 = 0;
    for (std::size_t k = 0; k < N; ++k) {
      double dot = 0;
      for (std::size_t i = 0; i < d; ++i) dot += s[i] * draws[k * d + i];
      const double a = std::cos(dot), b = std::sin(dot);
      c += a, c2 += a * a, sn += b, s2 += b * b;
    }
    const double Nf = static_cast<double>(N);
    c /= Nf, sn /= Nf;
    const double se_c = std::sqrt(std::max(c2 / Nf - c * c, 1e-300) / Nf);
    const double se_s = std::sqrt(std::max(s2 / Nf - sn * sn, 1e-300) / Nf);
    const auto phi = char_fn(alpha, p.nu, s);
    max_z = std::max({max_z, std::abs(c - phi.real()) / se_c, std::abs(sn - phi.imag()) / se_s});
  }
  // KS on the projection onto (1,...,1)/sqrt(d).
  auto project = [d](const double* x) {
    double t = 0;
    for (std::size_t i = 0; i < d; ++i) t += x[i];
    return t / std::sqrt(static_cast<double>(d));
  };
  std::vector<double> ref(N), paths(p.path_samples);
  for (std::size_t k = 0; k < N; ++k) ref[k] = project(draws.data() + k * d);
  for (auto& x : paths) {
    const LevyPath L = sample_path(alpha, p.nu, p.truncation, p.grid, rng);
    const Vec end = L.realized.terminal();
    x = project(end.data());
  }
  const KsResult ks = ks_two_sample(std::move(paths), std::move(ref));
  return {{"chf_max_z", max_z}, {"path_ks", ks.statistic}, {"path_ks_p_value", ks.p_value}};
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

[[noreturn]] void io_failure(const std::filesystem::path& file, const char* what) {
  throw std::runtime_error(std::string(what) + " " + file.string() + ": " + std::strerror(errno));
}

void write_text(const std::filesystem::path& file, const std::string& text) {
  std::ofstream out(file, std::ios::binary);
  if (!out) io_failure(file, "cannot open");
  out << text;
  out.flush();
  if (!out) io_failure(file, "cannot write");
}

}  // namespace

std::string to_string(ExperimentKind k) {
  for (const auto& [kind, name] : kKindNames)
    if (kind == k) return name;
  return "?";
}

ExperimentKind parse_kind(const std::string& s) {
  for (const auto& [kind, name] : kKindNames)
    if (s == name) return kind;
  throw ConfigError("/kind", "unknown kind '" + s + "'");
}

ExperimentConfig parse_config(const json& j) {
  if (!j.is_object()) throw ConfigError("", "config must be a JSON object");
  check_keys(j, {"experiment", "kind", "map", "alpha", "n", "seeds", "seed", "samples", "output", "csv", "timing", "threads", "params", "base_dir", "return_cap"}, "");
  ExperimentConfig c;
  if (!j.contains("experiment")) throw ConfigError("/experiment", "required");
  c.experiment = get_string(j.at("experiment"), "/experiment");
  if (c.experiment.empty()) throw ConfigError("/experiment", "must be nonempty");
  if (!j.contains("kind")) throw ConfigError("/kind", "required");
  c.kind = parse_kind(get_string(j.at("kind"), "/kind"));
  if (j.contains("alpha")) c.alpha = get_number(j.at("alpha"), "/alpha");

  if (j.contains("params")) {
    if (!j.at("params").is_object()) throw ConfigError("/params", "expected an object");
    c.params = j.at("params");
  }
  check_keys(c.params, allowed_params(c.kind), "/params");

  if (uses_map(c.kind)) {
    if (!j.contains("map")) throw ConfigError("/map", "required for kind " + to_string(c.kind));
    c.map = get_string(j.at("map"), "/map");
    const std::set<std::string> maps{"gauss", "lsv", "doubling", "tripling", "double-lsv"};
    if (!maps.count(c.map)) throw ConfigError("/map", "unknown map '" + c.map + "'");
    if (c.map != "gauss") {
      if (!c.alpha) throw ConfigError("/alpha", "required for map " + c.map);
      const bool expanding = c.map == "doubling" || c.map == "tripling";
      if (expanding && !(*c.alpha > 0 && *c.alpha < 1)) throw ConfigError("/alpha", "must lie in (0,1) for " + c.map);
      if (!expanding && !(*c.alpha > 1 && *c.alpha < 2)) throw ConfigError("/alpha", "must lie in (1,2) for " + c.map);
    }
    const bool symbolic = c.map == "doubling" || c.map == "tripling";
    if ((c.kind == ExperimentKind::MarginalKs || c.kind == ExperimentKind::ExcursionShape) && !symbolic)
      throw ConfigError("/map", to_string(c.kind) + " supports doubling and tripling only");
    if (c.kind == ExperimentKind::Overshoot && c.map == "double-lsv")
      throw ConfigError("/map", "overshoot needs a scalar observable");
    if (j.contains("return_cap")) c.return_cap = get_positive(j.at("return_cap"), "/return_cap");
  } else if (j.contains("map")) {
    throw ConfigError("/map", "not used by kind " + to_string(c.kind));
  } else if (j.contains("return_cap")) {
    throw ConfigError("/return_cap", "not used by kind " + to_string(c.kind));
  }
  if (c.kind == ExperimentKind::ChfCheck) {
    if (!c.alpha) throw ConfigError("/alpha", "required for chf-check");
    if (!(*c.alpha > 0 && *c.alpha < 2) || *c.alpha == 1.0) throw ConfigError("/alpha", "must lie in (0,1) or (1,2)");
  }

  if (uses_n(c.kind)) {
    if (!j.contains("n")) throw ConfigError("/n", "required for kind " + to_string(c.kind));
    const json& n = j.at("n");
    if (n.is_array()) {
      if (n.empty()) throw ConfigError("/n", "must be nonempty");
      for (std::size_t i = 0; i < n.size(); ++i) c.n.push_back(get_positive(n[i], "/n/" + std::to_string(i)));
    } else {
      c.n.push_back(get_positive(n, "/n"));
    }
    std::set<std::size_t> seen;
    for (std::size_t i = 0; i < c.n.size(); ++i)
      if (!seen.insert(c.n[i]).second) throw ConfigError("/n/" + std::to_string(i), "duplicate value");
  } else if (j.contains("n")) {
    throw ConfigError("/n", "not used by kind " + to_string(c.kind));
  }

  if (uses_samples(c.kind)) {
    if (!j.contains("samples")) throw ConfigError("/samples", "required for kind " + to_string(c.kind));
    c.samples = get_positive(j.at("samples"), "/samples");
  } else if (j.contains("samples")) {
    throw ConfigError("/samples", "not used by kind " + to_string(c.kind));
  }

  if (j.contains("seeds")) c.seeds = get_positive(j.at("seeds"), "/seeds");
  if (j.contains("seed")) c.seed = get_uint(j.at("seed"), "/seed");
  if (c.seed > static_cast<std::uint64_t>(INT64_MAX) - c.seeds) throw ConfigError("/seed", "seed range exceeds int64");
  if (j.contains("output")) c.output = get_string(j.at("output"), "/output");
  if (j.contains("csv")) c.csv = get_string(j.at("csv"), "/csv");
  if (j.contains("timing")) {
    if (!j.at("timing").is_boolean()) throw ConfigError("/timing", "expected a boolean");
    c.timing = j.at("timing").get<bool>();
  }
  if (j.contains("threads")) c.threads = get_positive(j.at("threads"), "/threads");

  if (j.contains("base_dir")) c.base_dir = get_string(j.at("base_dir"), "/base_dir");
  const std::filesystem::path base = c.base_dir;
  switch (c.kind) {
    case ExperimentKind::ProfileClassify: {
      (void)trace_sets(c, base);
      break;
    }
    case ExperimentKind::ChfCheck: {
      const ChfParams p = chf_params(c);
      if (p.nu.dim() == 0) throw ConfigError("/params/nu", "empty");
      break;
    }
    case ExperimentKind::ExcursionShape: (void)shape_params(c); break;
    case ExperimentKind::MarginalKs:
      if (c.params.contains("reference_samples")) (void)get_positive(c.params.at("reference_samples"), "/params/reference_samples");
      break;
    case ExperimentKind::Overshoot:
      if (c.params.contains("quantile")) {
        const double q = get_number(c.params.at("quantile"), "/params/quantile");
        if (!(q >= 0 && q < 1)) throw ConfigError("/params/quantile", "must lie in [0,1)");
      }
      break;
    default: break;
  }
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) io_failure(file, "cannot open");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("", std::string("invalid JSON: ") + e.what());
  }
  if (j.is_object() && !j.contains("base_dir")) j["base_dir"] = file.parent_path().string();
  return parse_config(j);
}

MedianCi median_ci(std::vector<double> xs) {
  if (xs.empty()) throw DomainError("median_ci: empty sample");
  std::sort(xs.begin(), xs.end());
  const std::size_t m = xs.size();
  const double med = m % 2 ? xs[m / 2] : 0.5 * (xs[m / 2 - 1] + xs[m / 2]);
  const double half = 0.98 * std::sqrt(static_cast<double>(m));
  const double mid = 0.5 * static_cast<double>(m);
  // 1-based ranks floor(m/2 - 0.98 sqrt m) and ceil(m/2 + 1 + 0.98 sqrt m).
  const auto lo = static_cast<std::ptrdiff_t>(std::floor(mid - half));
  const auto hi = static_cast<std::ptrdiff_t>(std::ceil(mid + 1.0 + half));
  const auto clamp = [m](std::ptrdiff_t r) { return static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(r, 1, static_cast<std::ptrdiff_t>(m))) - 1; };
  return {med, xs[clamp(lo)], xs[clamp(hi)]};
}

std::optional<Record> RunResult::aggregate(const std::string& statistic, std::uint64_t n) const {
  for (const auto& r : records)
    if (r.seed == -1 && r.statistic == statistic && r.n == n) return r;
  return std::nullopt;
}

RunResult run_experiment(const ExperimentConfig& cfg) {
  const std::filesystem::path base = cfg.base_dir;

  std::optional<InducedScheme> scheme;
  if (uses_map(cfg.kind)) {
    SchemeOptions opt;
    opt.return_cap = cfg.return_cap;
    scheme.emplace(InducedScheme::canonical(parse_map(cfg.map, cfg.alpha.value_or(1.0)), cfg.alpha.value_or(1.0), opt));
  }
  std::vector<TraceSet> sets;
  if (cfg.kind == ExperimentKind::ProfileClassify) sets = trace_sets(cfg, base);
  std::optional<ChfParams> chf;
  if (cfg.kind == ExperimentKind::ChfCheck) chf = chf_params(cfg);

  struct Task {
    std::size_t n;
    std::uint64_t seed;
  };
  std::vector<Task> tasks;
  const std::vector<std::size_t> ns = uses_n(cfg.kind) ? cfg.n : std::vector<std::size_t>{0};
  for (std::size_t n : ns)
    for (std::size_t k = 0; k < cfg.seeds; ++k) tasks.push_back({n, cfg.seed + k});

  std::vector<std::vector<Record>> out(tasks.size());
  std::vector<std::string> errors(tasks.size());
  std::atomic<std::size_t> next{0};
  const std::string kind_name = to_string(cfg.kind);

  auto worker = [&] {
    for (std::size_t i = next++; i < tasks.size(); i = next++) {
      const Task& t = tasks[i];
      try {
        const auto start = std::chrono::steady_clock::now();
        Rng rng = make_stream(t.seed, t.n);
        std::vector<Stat> stats;
        switch (cfg.kind) {
          case ExperimentKind::Lapnumber: stats = run_lapnumber(*scheme, t.n, rng); break;
          case ExperimentKind::MarginalKs: stats = run_marginal_ks(*scheme, cfg, t.n, rng); break;
          case ExperimentKind::Overshoot: stats = run_overshoot(*scheme, cfg, t.n, rng); break;
          case ExperimentKind::HypothesisTrend: stats = {{"hypothesis", hypothesis_main_stat(*scheme, t.n, rng)}}; break;
          case ExperimentKind::ExcursionShape: stats = run_excursion_shape(*scheme, cfg, rng); break;
          case ExperimentKind::ProfileClassify: stats = run_profile_classify(sets, cfg, rng); break;
          case ExperimentKind::ChfCheck: stats = run_chf_check(*chf, cfg, rng); break;
        }
        const double secs =
            cfg.timing ? std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count() : 0.0;
        for (const auto& st : stats)
          out[i].push_back({cfg.experiment, kind_name, t.n, static_cast<std::int64_t>(t.seed), st.name, st.value, st.value,
                            st.value, secs});
      } catch (const std::exception& e) {
        errors[i] = e.what();
        if (errors[i].empty()) errors[i] = "unknown failure";
      }
    }
  };
  const std::size_t nthreads = std::min(cfg.threads, tasks.size());
  if (nthreads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t k = 0; k < nthreads; ++k) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  RunResult result;
  std::set<std::int64_t> failed;
  std::string first_error;
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    if (!errors[i].empty()) {
      failed.insert(static_cast<std::int64_t>(tasks[i].seed));
      if (first_error.empty()) first_error = "seed " + std::to_string(tasks[i].seed) + ", n " + std::to_string(tasks[i].n) + ": " + errors[i];
    }
    result.records.insert(result.records.end(), out[i].begin(), out[i].end());
  }
  if (!failed.empty()) {
    std::vector<std::int64_t> completed;
    for (std::size_t k = 0; k < cfg.seeds; ++k) {
      const auto sd = static_cast<std::int64_t>(cfg.seed + k);
      if (!failed.count(sd)) completed.push_back(sd);
    }
    std::ostringstream msg;
    msg << "experiment " << cfg.experiment << ": " << failed.size() << " seed(s) failed (" << first_error
        << "); completed seeds:";
    for (auto sd : completed) msg << ' ' << sd;
    throw PartialResultError(msg.str(), std::move(completed), std::move(result));
  }

  // Aggregates per (statistic, n) in order of first appearance.
  std::vector<std::pair<std::string, std::uint64_t>> keys;
  std::map<std::pair<std::string, std::uint64_t>, std::pair<std::vector<double>, double>> groups;
  for (const auto& r : result.records) {
    auto key = std::make_pair(r.statistic, r.n);
    auto [it, inserted] = groups.try_emplace(key);
    if (inserted) keys.push_back(key);
    it->second.first.push_back(r.value);
    it->second.second += r.runtime_s;
  }
  for (const auto& key : keys) {
    const auto& [values, secs] = groups.at(key);
    const MedianCi m = median_ci(values);
    result.records.push_back({cfg.experiment, kind_name, key.second, -1, key.first, m.median, m.lo, m.hi, secs});
  }

  if (!cfg.output.empty()) write_results(result, cfg.output);
  if (!cfg.csv.empty()) emit_report(result, ReportFormat::Csv, cfg.csv);
  return result;
}

std::string to_csv(const RunResult& r) {
  std::string s = "experiment,kind,n,seed,statistic,value,ci_lo,ci_hi,runtime_s\n";
  for (const auto& x : r.records) {
    s += csv_field(x.experiment) + ',' + csv_field(x.kind) + ',' + std::to_string(x.n) + ',' + std::to_string(x.seed) + ',' +
         csv_field(x.statistic) + ',' + fmt(x.value) + ',' + fmt(x.ci_lo) + ',' + fmt(x.ci_hi) + ',' + fmt(x.runtime_s) + '\n';
  }
  return s;
}

json to_json(const RunResult& r) {
  json recs = json::array();
  for (const auto& x : r.records)
    recs.push_back({{"experiment", x.experiment}, {"kind", x.kind}, {"n", x.n}, {"seed", x.seed}, {"statistic", x.statistic},
                    {"value", x.value}, {"ci_lo", x.ci_lo}, {"ci_hi", x.ci_hi}, {"runtime_s", x.runtime_s}});
  return {{"records", std::move(recs)}};
}

RunResult result_from_json(const json& j) {
  RunResult r;
  try {
    for (const auto& x : j.at("records"))
      r.records.push_back({x.at("experiment").get<std::string>(), x.at("kind").get<std::string>(), x.at("n").get<std::uint64_t>(),
                           x.at("seed").get<std::int64_t>(), x.at("statistic").get<std::string>(), x.at("value").get<double>(),
                           x.at("ci_lo").get<double>(), x.at("ci_hi").get<double>(), x.at("runtime_s").get<double>()});
  } catch (const json::exception& e) {
    throw DomainError(std::string("results: malformed record: ") + e.what());
  }
  return r;
}

void write_results(const RunResult& r, const std::filesystem::path& file) {
  const std::vector<std::uint8_t> bytes = json::to_cbor(to_json(r));
  write_text(file, std::string(bytes.begin(), bytes.end()));
}

RunResult read_results(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) io_failure(file, "cannot open");
  const std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  try {
    return result_from_json(json::from_cbor(bytes));
  } catch (const json::exception& e) {
    throw DomainError("results: " + file.string() + " is not a results file: " + e.what());
  }
}

std::string render_report(const RunResult& r, ReportFormat format) {
  if (r.records.empty()) throw DomainError("report: empty result");
  return format == ReportFormat::Csv ? to_csv(r) : to_json(r).dump(2) + "\n";
}

void emit_report(const RunResult& r, ReportFormat format, const std::filesystem::path& file) {
  write_text(file, render_report(r, format));
}

}  // namespace declab
