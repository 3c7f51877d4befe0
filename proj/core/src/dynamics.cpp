#include "declab/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>

#include "declab/errors.hpp"
#include "declab/metrics.hpp"
#include "extended.hpp"

namespace declab {

namespace {

double uniform01(Rng& rng) {
  double u;
  do u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  while (u == 0.0);
  return u;
}

// Geometric step profile with values 1 - r^j at times 1 - 2^{-j}.
Profile geometric_profile(double r) {
  std::vector<double> times, values{0.0};
  const double a = std::abs(r);
  double p = 1.0;
  for (int j = 1; j <= 50; ++j) {
    p *= r;
    times.push_back(1.0 - std::ldexp(1.0, -j));
    values.push_back(1.0 - p);
    if (std::pow(a, j) < std::ldexp(1.0, -60)) break;
  }
  times.push_back(1.0 - std::ldexp(1.0, -static_cast<int>(times.size()) - 1));
  values.push_back(1.0);
  return Profile(StepPath::scalar(std::move(times), std::move(values)));
}

void check_alpha_range(double alpha, double lo, double hi, const char* who) {
  if (!(alpha > lo && alpha < hi))
    throw DomainError(std::string(who) + ": alpha must lie in (" + std::to_string(lo) + "," + std::to_string(hi) + ")");
}

// Mean of x along a long orbit, after a burn-in.
double orbit_mean_x(const MapSpec& m, std::size_t iterations, std::size_t burn_in) {
  double x = 0.2113248654051871;
  for (std::size_t k = 0; k < burn_in; ++k) x = declab::apply(m, x);
  long double sum = 0.0;
  for (std::size_t k = 0; k < iterations; ++k) {
    sum += x;
    x = declab::apply(m, x);
  }
  return static_cast<double>(sum / static_cast<long double>(iterations));
}

Vec unit(const Vec& v) {
  const double r = norm(v);
  if (r == 0.0) throw DomainError("zero direction");
  Vec out(v);
  for (double& x : out) x /= r;
  return out;
}

}  // namespace

Profile doubling_profile(double alpha) {
  check_alpha_range(alpha, 0.0, 1.0, "doubling profile");
  return geometric_profile(std::pow(2.0, -1.0 / alpha));
}

Profile tripling_profile(double alpha) {
  check_alpha_range(alpha, 0.0, 1.0, "tripling profile");
  return geometric_profile(-std::pow(3.0, -1.0 / alpha));
}

InducedScheme::InducedScheme(MapSpec map, ObservableSpec observable, ProfileSet profiles, double alpha,
                             SchemeOptions options)
    : map_(std::move(map)),
      observable_(std::move(observable)),
      profiles_(std::move(profiles)),
      alpha_(alpha),
      options_(options) {
  if (!profiles_.empty() && profiles_.dim() != observable_dim(observable_))
    throw DomainError("InducedScheme: profile and observable dimensions differ");
  if (options_.return_cap == 0) throw DomainError("InducedScheme: return cap must be positive");
}

InducedScheme InducedScheme::canonical(const MapSpec& map, double alpha, SchemeOptions options) {
  if (std::holds_alternative<Doubling>(map)) {
    check_alpha_range(alpha, 0.0, 1.0, "doubling");
    InducedScheme s(map, PowerPole{alpha}, ProfileSet({doubling_profile(alpha)}), alpha, options);
    s.geometric_base_ = 2;
    return s;
  }
  if (std::holds_alternative<Tripling>(map)) {
    check_alpha_range(alpha, 0.0, 1.0, "tripling");
    Profile p = tripling_profile(alpha);
    Profile m(affine_transform(p.path(), -1.0, Vec{0.0}));
    InducedScheme s(map, TwoPole{alpha}, ProfileSet({p, m}), alpha, options);
    s.geometric_base_ = 3;
    return s;
  }
  if (std::holds_alternative<Gauss>(map)) {
    return InducedScheme(map, GaussDigit{}, ProfileSet({Profile(StepPath::scalar({0.5}, {0.0, 1.0}))}), 1.0,
                         options);
  }
  const double a = std::visit(
      [](const auto& m) -> double {
        if constexpr (requires { m.alpha; }) return m.alpha;
        return 0.0;
      },
      map);
  check_alpha_range(a, 1.0, 2.0, map_name(map).c_str());
  const double mx = options.centering_iterations ? orbit_mean_x(map, options.centering_iterations, options.burn_in) : 0.0;
  if (std::holds_alternative<LSV>(map)) {
    HolderVector v{{1.0}, {0.0}, {options.centering_iterations ? 1.0 - mx : 0.0}};
    return InducedScheme(map, v, ProfileSet({Profile::linear({1.0}), Profile::linear({-1.0})}), a, options);
  }
  HolderVector v{{1.0, 0.0}, {0.0, 1.0}, {0.0, 0.0}};
  if (options.centering_iterations) v.centering = {1.0 - mx, mx};
  Vec w0 = unit({v.at_zero[0] - v.centering[0], v.at_zero[1] - v.centering[1]});
  Vec w1 = unit({v.at_one[0] - v.centering[0], v.at_one[1] - v.centering[1]});
  return InducedScheme(map, v, ProfileSet({Profile::linear(w0), Profile::linear(w1)}), a, options);
}

std::vector<std::pair<double, double>> InducedScheme::X() const {
  if (std::holds_alternative<Doubling>(map_) || std::holds_alternative<LSV>(map_)) return {{0.5, 1.0}};
  if (std::holds_alternative<DoubleLSV>(map_)) return {{0.25, 0.75}};
  if (std::holds_alternative<Tripling>(map_)) return {{0.0, 1.0 / 9.0}, {2.0 / 9.0, 1.0 / 3.0}, {4.0 / 9.0, 1.0}};
  return {{0.0, 1.0}};
}

bool InducedScheme::in_X(double x) const {
  for (auto [a, b] : X())
    if (x >= a && x <= b) return true;
  return false;
}

bool InducedScheme::in_X(const Orbit& o) const {
  const auto& c = o.cursor();
  if (const auto* b = std::get_if<BinaryShiftCursor>(&c)) return b->digit(1) == 1;
  if (const auto* t = std::get_if<TernaryShiftCursor>(&c)) {
    const int d1 = t->digit(1), d2 = t->digit(2);
    return !((d1 == 0 && d2 == 1) || (d1 == 1 && d2 == 0));
  }
  if (std::holds_alternative<Gauss>(map_)) return true;
  return in_X(o.point());
}

std::optional<double> InducedScheme::kac_mean() const {
  if (std::holds_alternative<Doubling>(map_)) return 2.0;
  if (std::holds_alternative<Tripling>(map_)) return 9.0 / 7.0;
  if (std::holds_alternative<Gauss>(map_)) return 1.0;
  return std::nullopt;
}

std::optional<double> InducedScheme::levy_scale() const {
  auto k = kac_mean();
  if (!k) return std::nullopt;
  return std::pow(*k, -1.0 / alpha_);
}

std::optional<SpectralMeasure> InducedScheme::spectral() const {
  if (std::holds_alternative<Doubling>(map_) || std::holds_alternative<Gauss>(map_)) return SpectralMeasure::point({1.0});
  if (std::holds_alternative<Tripling>(map_)) return SpectralMeasure::symmetric();
  if (std::holds_alternative<LSV>(map_)) return SpectralMeasure::point(profiles_[0].direction());
  return SpectralMeasure({{profiles_[0].direction(), 0.5}, {profiles_[1].direction(), 0.5}});
}

double InducedScheme::bn(std::size_t n) const {
  if (n == 0) throw DomainError("bn: n must be positive");
  const double nd = static_cast<double>(n);
  if (std::holds_alternative<Doubling>(map_)) {
    const double c = std::pow(2.0, -1.0 / alpha_);
    return std::pow(nd, 1.0 / alpha_) / (1.0 - c);
  }
  if (std::holds_alternative<Tripling>(map_)) {
    const double c = std::pow(3.0, -1.0 / alpha_);
    return std::pow(72.0 / 7.0, 1.0 / alpha_) / (1.0 / c + 1.0) * std::pow(nd, 1.0 / alpha_);
  }
  if (std::holds_alternative<Gauss>(map_)) return nd;
  return std::pow(nd, 1.0 / alpha_);
}

Orbit InducedScheme::sample_mu(Rng& rng) const {
  if (std::holds_alternative<Doubling>(map_)) return Orbit(BinaryShiftCursor(rng()));
  if (std::holds_alternative<Tripling>(map_)) return Orbit(TernaryShiftCursor(rng()));
  if (std::holds_alternative<Gauss>(map_)) {
    double x;
    do x = std::exp2(uniform01(rng)) - 1.0;
    while (!(x > 0.0 && x < 1.0));
    return Orbit(FloatCursor(map_, x));
  }
  return Orbit(FloatCursor(map_, uniform01(rng)));
}

Orbit InducedScheme::sample_muX(Rng& rng) const {
  if (std::holds_alternative<Doubling>(map_)) return Orbit(BinaryShiftCursor(rng(), {1}));
  if (std::holds_alternative<Tripling>(map_)) {
    static constexpr int pairs[7][2] = {{0, 0}, {0, 2}, {1, 1}, {1, 2}, {2, 0}, {2, 1}, {2, 2}};
    const auto k = std::uniform_int_distribution<int>(0, 6)(rng);
    return Orbit(TernaryShiftCursor(rng(), {pairs[k][0], pairs[k][1]}));
  }
  Orbit o = sample_mu(rng);
  if (std::holds_alternative<Gauss>(map_)) return o;
  for (std::size_t k = 0; k < options_.burn_in; ++k) o.step();
  for (std::size_t k = 0; !in_X(o); ++k) {
    if (k >= options_.return_cap) throw NonReturnError("sample_muX: orbit did not enter X", k);
    o.step();
  }
  return o;
}

Orbit InducedScheme::sample_muX_tail(std::size_t rmin, Rng& rng) const {
  if (rmin == 0) throw DomainError("sample_muX_tail: rmin must be positive");
  if (std::holds_alternative<Doubling>(map_)) {
    std::vector<int> prefix(rmin, 0);
    prefix[0] = 1;
    return Orbit(BinaryShiftCursor(rng(), std::move(prefix)));
  }
  if (std::holds_alternative<Tripling>(map_)) {
    // x in X with T^j x in [01] or [10] for 1 <= j < rmin: d_2 ... d_{rmin+1}
    // alternate, and (d_1, d_2) avoids 01 and 10.
    const int d2 = std::uniform_int_distribution<int>(0, 1)(rng);
    const int pick = std::uniform_int_distribution<int>(0, 1)(rng);
    const int d1 = d2 == 0 ? (pick ? 2 : 0) : (pick ? 2 : 1);
    std::vector<int> prefix{d1, d2};
    for (std::size_t j = 2; j <= rmin; ++j) prefix.push_back(1 - prefix.back());
    return Orbit(TernaryShiftCursor(rng(), std::move(prefix)));
  }
  throw UnsupportedError("sample_muX_tail: only doubling and tripling");
}

void next_excursion(const InducedScheme& s, Orbit& o, ExcursionData& out) {
  const std::size_t d = s.dim();
  if (!s.in_X(o)) throw DomainError("excursion must start in X");
  out.x0 = o.point();
  out.R = 0;
  out.partial.assign(d, 0.0);
  double v[16];
  std::vector<double> big;
  double* buf = d <= 16 ? v : (big.resize(d), big.data());
  while (true) {
    observe(s.observable(), o, buf);
    const std::size_t base = out.partial.size() - d;
    for (std::size_t i = 0; i < d; ++i) out.partial.push_back(out.partial[base + i] + buf[i]);
    o.step();
    ++out.R;
    if (s.in_X(o)) break;
    if (out.R >= s.options().return_cap) throw NonReturnError("no return to X within the cap", out.R);
  }
}

FirstReturn first_return(const InducedScheme& s, double x) {
  Orbit o = make_orbit(s.map(), x);
  if (!s.in_X(o)) throw DomainError("first_return: x is not in X");
  FirstReturn r;
  r.segment.push_back(x);
  while (true) {
    o.step();
    ++r.R;
    r.segment.push_back(o.point());
    if (s.in_X(o)) break;
    if (r.R >= s.options().return_cap) throw NonReturnError("no return to X within the cap", r.R);
  }
  return r;
}

StepPath xi_path(const ExcursionData& e, std::size_t dim) {
  std::vector<double> times(e.R);
  for (std::size_t l = 1; l <= e.R; ++l)
    times[l - 1] = l == e.R ? 1.0 : static_cast<double>(l) / static_cast<double>(e.R);
  return StepPath(dim, std::move(times), e.partial);
}

StepPath zeta_path(const InducedScheme& s, const Vec& V, std::size_t R) {
  if (R == 0) throw DomainError("zeta_path: R must be positive");
  const std::size_t d = V.size();
  const double J = norm(V);
  const std::ptrdiff_t idx = s.profiles().empty() || J == 0.0 ? -1 : nearest_index(V, s.profiles());
  const Profile* P = idx < 0 ? nullptr : &s.profiles()[static_cast<std::size_t>(idx)];
  if (P && is_step(P->path())) {
    Vec corr(d);
    for (std::size_t i = 0; i < d; ++i) corr[i] = V[i] - J * P->direction()[i];
    Path z = add_linear_drift(affine_transform(P->path(), J, Vec(d, 0.0)), corr, std::max<std::size_t>(R, 64));
    return std::get<StepPath>(with_terminal(z, V));
  }
  // Linear or polyline shape: sample on the same grid l/R as xi.
  std::vector<double> times(R), flat(d, 0.0);
  flat.reserve((R + 1) * d);
  for (std::size_t l = 1; l <= R; ++l) {
    const double t = l == R ? 1.0 : static_cast<double>(l) / static_cast<double>(R);
    times[l - 1] = t;
    if (l == R) {
      flat.insert(flat.end(), V.begin(), V.end());
      continue;
    }
    Vec p = P ? evaluate(P->path(), t) : Vec(d, 0.0);
    for (std::size_t i = 0; i < d; ++i) {
      const double w = P ? P->direction()[i] : 0.0;
      flat.push_back(J * p[i] + t * (V[i] - J * w));
    }
  }
  return StepPath(d, std::move(times), std::move(flat));
}

OrbitSample induced_observable(const InducedScheme& s, Orbit o) {
  ExcursionData e;
  next_excursion(s, o, e);
  const std::size_t d = s.dim();
  Vec V(e.partial.end() - static_cast<std::ptrdiff_t>(d), e.partial.end());
  return OrbitSample{e.x0, e.R, V, xi_path(e, d), zeta_path(s, V, e.R)};
}

OrbitSample induced_observable(const InducedScheme& s, double x) {
  return induced_observable(s, make_orbit(s.map(), x));
}

double excursion_distance(const InducedScheme& s, const ExcursionData& e) {
  const std::size_t d = s.dim();
  Vec V(e.partial.end() - static_cast<std::ptrdiff_t>(d), e.partial.end());
  return d_tildeD(xi_path(e, d), zeta_path(s, V, e.R)).value;
}

ExcursionDistance excursion_distance(const InducedScheme& s, Orbit& o) {
  const bool symbolic = !std::holds_alternative<FloatCursor>(o.cursor());
  std::optional<Orbit> start;
  if (symbolic && s.geometric_base() != 0) start.emplace(o);
  ExcursionData e;
  next_excursion(s, o, e);
  ExcursionDistance out{e.R, excursion_distance(s, e), false};
  if (start) {
    double vmax = 0.0;
    for (double v : e.partial) vmax = std::max(vmax, std::abs(v));
    if (static_cast<double>(e.R + 1) * vmax * 0x1p-52 > 1e-9) {
      out.distance = detail::extended_excursion_distance(s, *start);
      out.extended = true;
    }
  }
  return out;
}

double hypothesis_main_stat(const InducedScheme& s, std::size_t n, Rng& rng) {
  Orbit o = s.sample_muX(rng);
  double best = 0.0;
  for (std::size_t j = 0; j <= n; ++j) best = std::max(best, excursion_distance(s, o).distance);
  return best / s.bn(n);
}

VlResidual vl_residual(const InducedScheme& s, Orbit o, const std::vector<double>& lambdas) {
  ExcursionData e;
  next_excursion(s, o, e);
  const std::size_t d = s.dim();
  Vec V(e.partial.end() - static_cast<std::ptrdiff_t>(d), e.partial.end());
  VlResidual r;
  r.R = e.R;
  r.branch = s.profiles().empty() || norm(V) == 0.0 ? -1 : nearest_index(V, s.profiles());
  if (r.branch >= 0 && static_cast<std::size_t>(r.branch) >= lambdas.size())
    throw DomainError("vl_residual: missing lambda for profile " + std::to_string(r.branch));
  const double R = static_cast<double>(e.R);
  for (std::size_t l = 0; l <= e.R; ++l) {
    Vec p(d, 0.0);
    double lam = 0.0;
    if (r.branch >= 0) {
      p = evaluate(s.profiles()[static_cast<std::size_t>(r.branch)].path(), l == e.R ? 1.0 : static_cast<double>(l) / R);
      lam = lambdas[static_cast<std::size_t>(r.branch)];
    }
    double acc = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
      const double diff = e.partial[l * d + i] - lam * p[i] * R;
      acc += diff * diff;
    }
    r.residual = std::max(r.residual, std::sqrt(acc));
  }
  r.normalized = r.residual / R;
  return r;
}

WnPath wn_path(const InducedScheme& s, Orbit o, std::size_t n) {
  if (n == 0) throw DomainError("wn_path: n must be positive");
  const std::size_t d = s.dim();
  const double b = s.bn(n);
  std::vector<double> sum(d, 0.0), v(d), times(n), flat(d, 0.0);
  flat.reserve((n + 1) * d);
  std::vector<std::size_t> returns;
  for (std::size_t j = 0; j < n; ++j) {
    observe(s.observable(), o, v.data());
    for (std::size_t i = 0; i < d; ++i) {
      sum[i] += v[i];
      flat.push_back(sum[i] / b);
    }
    o.step();
    times[j] = j + 1 == n ? 1.0 : static_cast<double>(j + 1) / static_cast<double>(n);
    if (s.in_X(o)) returns.push_back(j + 1);
  }
  return {StepPath(d, std::move(times), std::move(flat)), std::move(returns)};
}

StepPath wnv_path(const InducedScheme& s, Orbit o, std::size_t n) {
  if (n == 0) throw DomainError("wnv_path: n must be positive");
  const std::size_t d = s.dim();
  const double b = s.bn(n);
  std::vector<double> sum(d, 0.0), times(n), flat(d, 0.0);
  ExcursionData e;
  for (std::size_t j = 0; j < n; ++j) {
    next_excursion(s, o, e);
    for (std::size_t i = 0; i < d; ++i) {
      sum[i] += e.partial[e.R * d + i];
      flat.push_back(sum[i] / b);
    }
    times[j] = j + 1 == n ? 1.0 : static_cast<double>(j + 1) / static_cast<double>(n);
  }
  return StepPath(d, std::move(times), std::move(flat));
}

UnPath un_path(const InducedScheme& s, Orbit o, std::size_t n) {
  if (n == 0) throw DomainError("un_path: n must be positive");
  if (!s.in_X(o)) throw DomainError("un_path: x must lie in X");
  const std::size_t d = s.dim();
  const double b = s.bn(n);
  std::vector<double> sum(d, 0.0), v(d), times, flat(d, 0.0);
  std::vector<std::size_t> lap{0};
  lap.reserve(n + 1);
  for (std::size_t k = 1; k <= n; ++k) {
    observe(s.observable(), o, v.data());
    for (std::size_t i = 0; i < d; ++i) sum[i] += v[i];
    o.step();
    if (s.in_X(o)) {
      times.push_back(k == n ? 1.0 : static_cast<double>(k) / static_cast<double>(n));
      for (std::size_t i = 0; i < d; ++i) flat.push_back(sum[i] / b);
      lap.push_back(lap.back() + 1);
    } else {
      lap.push_back(lap.back());
    }
  }
  std::vector<double> jump_times(times);
  return {StepPath(d, std::move(jump_times), std::move(flat)), std::move(lap), std::move(times)};
}

Vec birkhoff_sum(const InducedScheme& s, Orbit o, std::size_t n) {
  const std::size_t d = s.dim();
  Vec sum(d, 0.0), v(d);
  if (d == 1) {
    double acc = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      acc += observe_scalar(s.observable(), o);
      o.step();
    }
    sum[0] = acc;
    return sum;
  }
  for (std::size_t j = 0; j < n; ++j) {
    observe(s.observable(), o, v.data());
    for (std::size_t i = 0; i < d; ++i) sum[i] += v[i];
    o.step();
  }
  return sum;
}

std::size_t lap_number(const InducedScheme& s, Orbit o, std::size_t n) {
  std::size_t N = 0;
  for (std::size_t l = 1; l <= n; ++l) {
    o.step();
    if (s.in_X(o)) ++N;
  }
  return N;
}

std::vector<InducedSample> induce(const InducedScheme& s, std::size_t count, Rng& rng) {
  const bool exact = std::holds_alternative<Doubling>(s.map()) || std::holds_alternative<Tripling>(s.map()) ||
                     std::holds_alternative<Gauss>(s.map());
  const std::size_t d = s.dim();
  std::vector<InducedSample> out;
  out.reserve(count);
  ExcursionData e;
  std::optional<Orbit> chain;
  for (std::size_t k = 0; k < count; ++k) {
    if (exact || !chain) chain.emplace(s.sample_muX(rng));
    next_excursion(s, *chain, e);
    out.push_back({e.x0, e.R, Vec(e.partial.end() - static_cast<std::ptrdiff_t>(d), e.partial.end())});
  }
  return out;
}

}  // namespace declab
