#include "declab/fprime.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>

#include "declab/errors.hpp"

namespace declab {

namespace {

constexpr double kEndpointTol = 1e-12;

bool close(std::span<const double> a, std::span<const double> b) {
  for (std::size_t i = 0; i < a.size(); ++i)
    if (std::abs(a[i] - b[i]) > kEndpointTol * std::max(1.0, std::abs(b[i]))) return false;
  return true;
}

std::span<const double> flat_of(const Path& p) {
  return std::visit([](const auto& x) { return x.flat_values(); }, p);
}

// Accumulates a step path from (time, state) events, dropping repeats.
class StepBuilder {
 public:
  explicit StepBuilder(std::size_t d) : d_(d) {}

  void push(double t, std::span<const double> state) {
    if (!flat_.empty() && std::equal(state.begin(), state.end(), flat_.end() - static_cast<std::ptrdiff_t>(d_))) return;
    if (flat_.empty()) {
      flat_.assign(state.begin(), state.end());
      return;
    }
    times_.push_back(t);
    flat_.insert(flat_.end(), state.begin(), state.end());
  }

  // Rescales times by 1/total into (0,1].
  StepPath finish(double total) && {
    double prev = 0.0;
    for (double& t : times_) {
      t = std::min(1.0, t / total);
      if (t <= prev) t = std::nextafter(prev, 2.0);
      if (t > 1.0) throw DomainError("pi_D: time resolution exhausted");
      prev = t;
    }
    return StepPath(d_, std::move(times_), std::move(flat_));
  }

 private:
  std::size_t d_;
  std::vector<double> times_, flat_;
};

const StepPath& as_step(const Path& p, double polyline_step, std::optional<StepPath>& storage, bool& converted) {
  if (const auto* s = std::get_if<StepPath>(&p)) return *s;
  if (!(polyline_step > 0.0)) throw DomainError("pi_D: polyline pieces need a positive polyline_step");
  storage = to_step(std::get<PolylinePath>(p), polyline_step);
  converted = true;
  return *storage;
}

}  // namespace

Decorated::Decorated(Path u, std::vector<double> S, std::vector<Path> excursions)
    : u_(std::move(u)), S_(std::move(S)), excursions_(std::move(excursions)) {
  const std::size_t d = declab::dim(u_);
  if (S_.size() != excursions_.size()) throw DomainError("Decorated: S and excursions differ in size");
  double prev = 0.0;
  for (double t : S_) {
    if (!(t > prev) || t > 1.0) throw DomainError("Decorated: S must be strictly increasing in (0,1]");
    prev = t;
  }
  if (const auto* s = std::get_if<StepPath>(&u_)) {
    for (double t : s->discontinuities())
      if (!std::binary_search(S_.begin(), S_.end(), t))
        throw DomainError("Decorated: discontinuity at " + std::to_string(t) + " not in S");
  }
  for (std::size_t k = 0; k < S_.size(); ++k) {
    const Path& e = excursions_[k];
    if (declab::dim(e) != d) throw DomainError("Decorated: excursion dimension mismatch");
    Vec left = evaluate(u_, S_[k], Side::Left), right = evaluate(u_, S_[k]);
    if (!close(evaluate(e, 0.0), left) || !close(evaluate(e, 1.0), right))
      throw DomainError("Decorated: excursion endpoints do not match u at " + std::to_string(S_[k]));
  }
}

Box range_box(const Path& e) {
  const std::size_t d = dim(e);
  auto flat = flat_of(e);
  Box b{Vec(flat.begin(), flat.begin() + static_cast<std::ptrdiff_t>(d)),
        Vec(flat.begin(), flat.begin() + static_cast<std::ptrdiff_t>(d))};
  for (std::size_t k = d; k < flat.size(); ++k) {
    b.lo[k % d] = std::min(b.lo[k % d], flat[k]);
    b.hi[k % d] = std::max(b.hi[k % d], flat[k]);
  }
  return b;
}

EElement pi_E(const Decorated& x) {
  EElement e{x.u(), x.S(), {}};
  e.boxes.reserve(x.S().size());
  for (const auto& exc : x.excursions()) e.boxes.push_back(range_box(exc));
  return e;
}

GraphSet e_graph(const EElement& e) {
  // The box completion of u only adds [[u(tau-), u(tau)]] at discontinuities,
  // which lies inside K^tau since S contains Disc_u.
  GraphSet g = completed_graph(e.u, Completion::Box);
  for (std::size_t k = 0; k < e.S.size(); ++k) g.primitives.emplace_back(TimeBox{e.S[k], e.boxes[k].lo, e.boxes[k].hi});
  return g;
}

SplicedPath pi_D(const Decorated& x, double polyline_step) {
  const std::size_t d = x.dim();
  bool converted = false;
  std::optional<StepPath> u_storage;
  const StepPath& u = as_step(x.u(), polyline_step, u_storage, converted);
  auto ut = u.times();
  const auto& S = x.S();

  StepBuilder out(d);
  out.push(0.0, u.state(0));
  double offset = 0.0;
  std::size_t k = 0, m = 0;
  while (k < ut.size() || m < S.size()) {
    if (m < S.size() && (k == ut.size() || S[m] <= ut[k])) {
      const double tau = S[m];
      const double len = 1.0 / (static_cast<double>(m + 1) * static_cast<double>(m + 1));
      const double base = tau + offset;
      std::optional<StepPath> e_storage;
      const StepPath& e = as_step(x.excursions()[m], polyline_step, e_storage, converted);
      out.push(base, e.state(0));
      auto et = e.times();
      for (std::size_t i = 0; i < et.size(); ++i) out.push(base + len * et[i], e.state(i + 1));
      offset += len;
      if (k < ut.size() && ut[k] == tau) ++k;
      out.push(tau + offset, u.state(k));
      ++m;
    } else {
      out.push(ut[k] + offset, u.state(k + 1));
      ++k;
    }
  }
  return {std::move(out).finish(1.0 + offset), converted ? polyline_step / 2.0 : 0.0};
}

MetricResult d_E(const Decorated& x, const Decorated& y, double delta) {
  if (x.dim() != y.dim()) throw DomainError("d_E: dimension mismatch");
  return hausdorff(e_graph(pi_E(x)), e_graph(pi_E(y)), delta);
}

MetricResult d_Fprime(const Decorated& x, const Decorated& y, double delta, double polyline_step) {
  if (x.dim() != y.dim()) throw DomainError("d_Fprime: dimension mismatch");
  MetricResult e = d_E(x, y, delta);
  SplicedPath px = pi_D(x, polyline_step), py = pi_D(y, polyline_step);
  MetricResult dd = d_tildeD(px.path, py.path);
  return {e.value + dd.value, e.error_bound + px.discretization_error + py.discretization_error, Method::Sampled};
}

Decorated chi(const Path& u, const ProfileSet& profiles) {
  const auto* s = std::get_if<StepPath>(&u);
  if (!s) return Decorated::plain(u);
  const std::size_t d = s->dim();
  if (!profiles.empty() && profiles.dim() != d) throw DomainError("chi: profile dimension mismatch");
  std::vector<double> S;
  std::vector<Path> exc;
  for (std::size_t k = 0; k < s->jump_count(); ++k) {
    Vec prev = s->state_vec(k), next = s->state_vec(k + 1);
    if (prev == next) continue;
    Vec delta(d);
    for (std::size_t i = 0; i < d; ++i) delta[i] = next[i] - prev[i];
    const double J = norm(delta);
    const std::ptrdiff_t idx = profiles.empty() ? -1 : nearest_index(delta, profiles);
    S.push_back(s->times()[k]);
    if (idx < 0) {
      exc.emplace_back(PolylinePath::segment(prev, next));
      continue;
    }
    const Profile& P = profiles[static_cast<std::size_t>(idx)];
    Path e = affine_transform(P.path(), J, prev);
    Vec corr(d);
    for (std::size_t i = 0; i < d; ++i) corr[i] = delta[i] - J * P.direction()[i];
    e = add_linear_drift(e, corr);
    exc.push_back(with_terminal(e, next));
  }
  return Decorated(u, std::move(S), std::move(exc));
}

Decorated embed_step_trivial(const StepPath& w, std::size_t n) {
  if (n == 0) throw DomainError("embed_step_trivial: n must be positive");
  const double nd = static_cast<double>(n);
  const std::size_t d = w.dim();
  std::vector<double> S(n);
  for (std::size_t j = 1; j <= n; ++j) S[j - 1] = static_cast<double>(j) / nd;
  for (double t : w.discontinuities()) {
    const double j = std::nearbyint(t * nd);
    if (j < 1.0 || std::abs(t - j / nd) > 1e-12) throw DomainError("embed_step_trivial: jump at non-grid time " + std::to_string(t));
    S[static_cast<std::size_t>(j) - 1] = t;
  }
  std::vector<Path> exc;
  exc.reserve(n);
  std::vector<double> flat(2 * d);
  for (double tau : S) {
    auto a = w.state(w.state_index(tau, Side::Left)), b = w.state(w.state_index(tau));
    std::copy(a.begin(), a.end(), flat.begin());
    std::copy(b.begin(), b.end(), flat.begin() + static_cast<std::ptrdiff_t>(d));
    exc.emplace_back(StepPath(d, {0.5}, flat));
  }
  return Decorated(w, std::move(S), std::move(exc));
}

Decorated decorate_levy(const LevyPath& L, const ProfileSet& profiles) {
  const StepPath& r = L.realized;
  std::vector<std::ptrdiff_t> profile_of(L.nu.size());
  for (std::size_t i = 0; i < L.nu.size(); ++i) profile_of[i] = profiles.empty() ? -1 : profiles.find(L.nu[i].omega);
  auto times = r.times();
  std::vector<double> S(times.begin(), times.end());
  std::vector<Path> exc;
  exc.reserve(S.size());
  std::size_t a = 0;
  for (std::size_t k = 0; k < times.size(); ++k) {
    Vec prev = r.state_vec(k), next = r.state_vec(k + 1);
    if (a < L.jumps.size() && L.jumps[a].t == times[k]) {
      const auto& jump = L.jumps[a++];
      const std::ptrdiff_t idx = profile_of[jump.dir];
      if (idx < 0) throw DomainError("decorate_levy: no profile for jump direction " + std::to_string(jump.dir));
      Path e = affine_transform(profiles[static_cast<std::size_t>(idx)].path(), jump.size, prev);
      exc.push_back(with_terminal(e, next));
    } else {
      exc.emplace_back(PolylinePath::segment(prev, next));
    }
  }
  return Decorated(r, std::move(S), std::move(exc));
}

StepPath psi_max(const Decorated& x) {
  if (x.dim() != 1) throw DomainError("psi_max: only defined for d = 1");
  const auto* u = std::get_if<StepPath>(&x.u());
  if (!u) throw DomainError("psi_max: base path must be a step path");
  const EElement e = pi_E(x);
  auto ut = u->times();
  const auto& S = x.S();
  double run = u->state(0)[0];
  std::vector<double> times, values{run};
  auto record = [&](double t, double v) {
    if (v <= run) return;
    run = v;
    times.push_back(t);
    values.push_back(v);
  };
  std::size_t k = 0, m = 0;
  while (k < ut.size() || m < S.size()) {
    if (m < S.size() && (k == ut.size() || S[m] <= ut[k])) {
      if (k < ut.size() && ut[k] == S[m]) ++k;
      record(S[m], e.boxes[m].hi[0]);
      ++m;
    } else {
      record(ut[k], u->state(k + 1)[0]);
      ++k;
    }
  }
  return StepPath::scalar(std::move(times), std::move(values));
}

}  // namespace declab
