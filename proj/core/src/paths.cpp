#include "declab/paths.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "declab/errors.hpp"

namespace declab {

namespace {

constexpr double kProfileTol = 1e-12;

void check_time(double t) {
  if (!(t >= 0.0 && t <= 1.0)) throw DomainError("time outside [0,1]: " + std::to_string(t));
}

void check_finite(std::span<const double> xs, const char* what) {
  for (double x : xs)
    if (!std::isfinite(x)) throw DomainError(std::string(what) + ": non-finite value");
}

bool same_state(std::span<const double> a, std::span<const double> b) {
  return std::equal(a.begin(), a.end(), b.begin(), b.end());
}

}  // namespace

double norm(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

// ---------------------------------------------------------------------------
// StepPath

StepPath::StepPath(std::size_t dim, Vec u0) : dim_(dim), values_(std::move(u0)) { validate(); }

StepPath::StepPath(std::size_t dim, std::vector<double> times, std::vector<double> flat_values)
    : dim_(dim), times_(std::move(times)), values_(std::move(flat_values)) {
  validate();
}

StepPath StepPath::scalar(std::vector<double> times, std::vector<double> values) {
  return StepPath(1, std::move(times), std::move(values));
}

void StepPath::validate() const {
  if (dim_ == 0) throw DomainError("StepPath: dim must be positive");
  if (values_.size() != (times_.size() + 1) * dim_)
    throw DomainError("StepPath: expected " + std::to_string((times_.size() + 1) * dim_) +
                      " values, got " + std::to_string(values_.size()));
  double prev = 0.0;
  for (double t : times_) {
    if (!(t > prev) || t > 1.0)
      throw DomainError("StepPath: jump times must be strictly increasing in (0,1]");
    prev = t;
  }
  check_finite(values_, "StepPath");
}

Vec StepPath::state_vec(std::size_t k) const {
  auto s = state(k);
  return Vec(s.begin(), s.end());
}

std::size_t StepPath::state_index(double t, Side side) const {
  check_time(t);
  if (side == Side::Left) {
    if (t == 0.0) throw DomainError("left limit requested at t=0");
    return static_cast<std::size_t>(std::lower_bound(times_.begin(), times_.end(), t) - times_.begin());
  }
  return static_cast<std::size_t>(std::upper_bound(times_.begin(), times_.end(), t) - times_.begin());
}

Vec StepPath::evaluate(double t, Side side) const { return state_vec(state_index(t, side)); }

std::vector<double> StepPath::discontinuities() const {
  std::vector<double> out;
  for (std::size_t k = 0; k < times_.size(); ++k)
    if (!same_state(state(k), state(k + 1))) out.push_back(times_[k]);
  return out;
}

// ---------------------------------------------------------------------------
// PolylinePath

PolylinePath::PolylinePath(std::size_t dim, std::vector<double> times, std::vector<double> flat_values)
    : dim_(dim), times_(std::move(times)), values_(std::move(flat_values)) {
  validate();
}

PolylinePath PolylinePath::segment(const Vec& a, const Vec& b) {
  if (a.size() != b.size()) throw DomainError("PolylinePath::segment: dimension mismatch");
  Vec flat(a);
  flat.insert(flat.end(), b.begin(), b.end());
  return PolylinePath(a.size(), {0.0, 1.0}, std::move(flat));
}

void PolylinePath::validate() const {
  if (dim_ == 0) throw DomainError("PolylinePath: dim must be positive");
  if (times_.size() < 2) throw DomainError("PolylinePath: need at least two breakpoints");
  if (values_.size() != times_.size() * dim_) throw DomainError("PolylinePath: value count mismatch");
  if (times_.front() != 0.0 || times_.back() != 1.0)
    throw DomainError("PolylinePath: breakpoints must start at 0 and end at 1");
  for (std::size_t k = 1; k < times_.size(); ++k)
    if (!(times_[k] > times_[k - 1])) throw DomainError("PolylinePath: times must be strictly increasing");
  check_finite(values_, "PolylinePath");
}

Vec PolylinePath::point_vec(std::size_t k) const {
  auto s = point(k);
  return Vec(s.begin(), s.end());
}

Vec PolylinePath::evaluate(double t) const {
  check_time(t);
  auto it = std::upper_bound(times_.begin(), times_.end(), t);
  if (it == times_.end()) return point_vec(times_.size() - 1);
  std::size_t k = static_cast<std::size_t>(it - times_.begin());  // times_[k-1] <= t < times_[k]
  double t0 = times_[k - 1], t1 = times_[k];
  if (t == t0) return point_vec(k - 1);
  double w = (t - t0) / (t1 - t0);
  Vec out(dim_);
  auto a = point(k - 1), b = point(k);
  for (std::size_t i = 0; i < dim_; ++i) out[i] = a[i] + w * (b[i] - a[i]);
  return out;
}

// ---------------------------------------------------------------------------
// Path helpers

std::size_t dim(const Path& u) {
  return std::visit([](const auto& p) { return p.dim(); }, u);
}

bool is_step(const Path& u) { return std::holds_alternative<StepPath>(u); }

Vec evaluate(const Path& u, double t, Side side) {
  if (const auto* s = std::get_if<StepPath>(&u)) return s->evaluate(t, side);
  check_time(t);
  if (side == Side::Left && t == 0.0) throw DomainError("left limit requested at t=0");
  return std::get<PolylinePath>(u).evaluate(t);
}

namespace {

std::vector<double> affine_values(std::span<const double> flat, std::size_t d, double scale,
                                  const Vec& offset) {
  if (offset.size() != d) throw DomainError("affine_transform: offset dimension mismatch");
  std::vector<double> out(flat.size());
  for (std::size_t k = 0; k < flat.size(); ++k) out[k] = scale * flat[k] + offset[k % d];
  return out;
}

}  // namespace

StepPath affine_transform(const StepPath& u, double scale, const Vec& offset) {
  auto t = u.times();
  return StepPath(u.dim(), std::vector<double>(t.begin(), t.end()),
                  affine_values(u.flat_values(), u.dim(), scale, offset));
}

PolylinePath affine_transform(const PolylinePath& u, double scale, const Vec& offset) {
  auto t = u.times();
  return PolylinePath(u.dim(), std::vector<double>(t.begin(), t.end()),
                      affine_values(u.flat_values(), u.dim(), scale, offset));
}

Path affine_transform(const Path& u, double scale, const Vec& offset) {
  return std::visit([&](const auto& p) -> Path { return affine_transform(p, scale, offset); }, u);
}

Path add_linear_drift(const Path& u, const Vec& drift, std::size_t grid) {
  const std::size_t d = dim(u);
  if (drift.size() != d) throw DomainError("add_linear_drift: dimension mismatch");
  if (const auto* p = std::get_if<PolylinePath>(&u)) {
    auto t = p->times();
    std::vector<double> flat(p->flat_values().begin(), p->flat_values().end());
    for (std::size_t k = 0; k < t.size(); ++k)
      for (std::size_t i = 0; i < d; ++i) flat[k * d + i] += t[k] * drift[i];
    return PolylinePath(d, std::vector<double>(t.begin(), t.end()), std::move(flat));
  }
  const auto& s = std::get<StepPath>(u);
  if (std::all_of(drift.begin(), drift.end(), [](double x) { return x == 0.0; })) return s;
  if (grid == 0) throw DomainError("add_linear_drift: grid must be positive");

  std::vector<double> times(s.times().begin(), s.times().end());
  for (std::size_t j = 1; j < grid; ++j) times.push_back(static_cast<double>(j) / static_cast<double>(grid));
  times.push_back(1.0);
  std::sort(times.begin(), times.end());
  times.erase(std::unique(times.begin(), times.end()), times.end());

  std::vector<double> flat;
  flat.reserve((times.size() + 1) * d);
  auto u0 = s.state(0);
  flat.insert(flat.end(), u0.begin(), u0.end());
  for (double t : times) {
    auto st = s.state(s.state_index(t));
    for (std::size_t i = 0; i < d; ++i) flat.push_back(st[i] + t * drift[i]);
  }
  return StepPath(d, std::move(times), std::move(flat));
}

StepPath to_step(const PolylinePath& p, double max_value_step) {
  if (!(max_value_step > 0.0)) throw DomainError("to_step: max_value_step must be positive");
  const std::size_t d = p.dim();
  auto t = p.times();
  std::vector<double> times;
  std::vector<double> flat(p.point(0).begin(), p.point(0).end());
  for (std::size_t k = 1; k < t.size(); ++k) {
    auto a = p.point(k - 1), b = p.point(k);
    double len = 0.0;
    for (std::size_t i = 0; i < d; ++i) len += (b[i] - a[i]) * (b[i] - a[i]);
    len = std::sqrt(len);
    auto pieces = static_cast<std::size_t>(std::max(1.0, std::ceil(len / max_value_step)));
    for (std::size_t j = 1; j <= pieces; ++j) {
      double w = static_cast<double>(j) / static_cast<double>(pieces);
      times.push_back(j == pieces ? t[k] : t[k - 1] + w * (t[k] - t[k - 1]));
      for (std::size_t i = 0; i < d; ++i) flat.push_back(j == pieces ? b[i] : a[i] + w * (b[i] - a[i]));
    }
  }
  return StepPath(d, std::move(times), std::move(flat));
}

Path with_terminal(const Path& u, const Vec& value) {
  const std::size_t d = dim(u);
  if (value.size() != d) throw DomainError("with_terminal: dimension mismatch");
  return std::visit(
      [&](const auto& p) -> Path {
        std::vector<double> flat(p.flat_values().begin(), p.flat_values().end());
        std::copy(value.begin(), value.end(), flat.end() - static_cast<std::ptrdiff_t>(d));
        return std::decay_t<decltype(p)>(d, std::vector<double>(p.times().begin(), p.times().end()), std::move(flat));
      },
      u);
}

double sup_norm(const Path& u) {
  auto flat = std::visit([](const auto& p) { return p.flat_values(); }, u);
  const std::size_t d = dim(u);
  double m = 0.0;
  for (std::size_t k = 0; k < flat.size(); k += d) m = std::max(m, norm(flat.subspan(k, d)));
  return m;
}

// ---------------------------------------------------------------------------
// Graph geometry

double distance(std::span<const double> x, const Primitive& prim) {
  if (const auto* s = std::get_if<Segment>(&prim)) {
    const std::size_t n = s->p.size();
    double dd = 0.0, dx = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double e = s->q[i] - s->p[i];
      dd += e * e;
      dx += (x[i] - s->p[i]) * e;
    }
    double w = dd > 0.0 ? std::clamp(dx / dd, 0.0, 1.0) : 0.0;
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double r = x[i] - (s->p[i] + w * (s->q[i] - s->p[i]));
      acc += r * r;
    }
    return std::sqrt(acc);
  }
  const auto& b = std::get<TimeBox>(prim);
  double acc = (x[0] - b.t) * (x[0] - b.t);
  for (std::size_t i = 0; i < b.lo.size(); ++i) {
    double y = x[i + 1];
    double r = y < b.lo[i] ? b.lo[i] - y : (y > b.hi[i] ? y - b.hi[i] : 0.0);
    acc += r * r;
  }
  return std::sqrt(acc);
}

namespace {

Vec lift(double t, std::span<const double> v) {
  Vec out;
  out.reserve(v.size() + 1);
  out.push_back(t);
  out.insert(out.end(), v.begin(), v.end());
  return out;
}

}  // namespace

GraphSet completed_graph(const Path& u, Completion completion) {
  GraphSet g;
  g.dim = dim(u);
  if (const auto* p = std::get_if<PolylinePath>(&u)) {
    auto t = p->times();
    for (std::size_t k = 1; k < t.size(); ++k)
      g.primitives.emplace_back(Segment{lift(t[k - 1], p->point(k - 1)), lift(t[k], p->point(k))});
    return g;
  }
  const auto& s = std::get<StepPath>(u);
  auto times = s.times();
  const std::size_t d = s.dim();
  double start = 0.0;
  std::size_t current = 0;
  for (std::size_t k = 0; k < times.size(); ++k) {
    if (same_state(s.state(k), s.state(k + 1))) continue;
    double tau = times[k];
    g.primitives.emplace_back(Segment{lift(start, s.state(current)), lift(tau, s.state(current))});
    auto a = s.state(k), b = s.state(k + 1);
    if (completion == Completion::Segment) {
      g.primitives.emplace_back(Segment{lift(tau, a), lift(tau, b)});
    } else {
      TimeBox box{tau, Vec(d), Vec(d)};
      for (std::size_t i = 0; i < d; ++i) {
        box.lo[i] = std::min(a[i], b[i]);
        box.hi[i] = std::max(a[i], b[i]);
      }
      g.primitives.emplace_back(std::move(box));
    }
    start = tau;
    current = k + 1;
  }
  if (start < 1.0 || g.primitives.empty())
    g.primitives.emplace_back(Segment{lift(start, s.state(current)), lift(1.0, s.state(current))});
  return g;
}

// ---------------------------------------------------------------------------
// Profiles

Profile::Profile(Path path) : path_(std::move(path)) {
  const std::size_t d = declab::dim(path_);
  Vec p0 = evaluate(path_, 0.0);
  if (norm(p0) > kProfileTol) throw DomainError("Profile: P(0) must be 0");
  direction_ = evaluate(path_, 1.0);
  double r = norm(direction_);
  if (r > kProfileTol && std::abs(r - 1.0) > kProfileTol)
    throw DomainError("Profile: |P(1)| must be 0 or 1, got " + std::to_string(r));
  if (r <= kProfileTol) direction_.assign(d, 0.0);
}

Profile Profile::zero(std::size_t dim) { return Profile(StepPath(dim, Vec(dim, 0.0))); }

Profile Profile::linear(const Vec& omega) { return Profile(PolylinePath::segment(Vec(omega.size(), 0.0), omega)); }

bool Profile::is_zero() const noexcept { return norm(direction_) == 0.0; }

ProfileSet::ProfileSet(std::vector<Profile> profiles) : profiles_(std::move(profiles)) {
  for (std::size_t i = 0; i < profiles_.size(); ++i) {
    if (profiles_[i].dim() != profiles_[0].dim()) throw DomainError("ProfileSet: dimension mismatch");
    if (profiles_[i].is_zero()) throw DomainError("ProfileSet: zero profile not allowed");
    for (std::size_t j = 0; j < i; ++j) {
      Vec diff(profiles_[i].direction());
      for (std::size_t k = 0; k < diff.size(); ++k) diff[k] -= profiles_[j].direction()[k];
      if (norm(diff) <= kProfileTol) throw DomainError("ProfileSet: duplicate terminal direction");
    }
  }
}

std::size_t ProfileSet::dim() const {
  if (profiles_.empty()) throw DomainError("ProfileSet: empty");
  return profiles_[0].dim();
}

std::ptrdiff_t ProfileSet::find(const Vec& omega) const {
  for (std::size_t i = 0; i < profiles_.size(); ++i) {
    const Vec& w = profiles_[i].direction();
    if (w.size() != omega.size()) continue;
    double acc = 0.0;
    for (std::size_t k = 0; k < w.size(); ++k) acc += (w[k] - omega[k]) * (w[k] - omega[k]);
    if (std::sqrt(acc) <= kProfileTol) return static_cast<std::ptrdiff_t>(i);
  }
  return -1;
}

std::ptrdiff_t nearest_index(const Vec& y, const ProfileSet& profiles) {
  if (profiles.empty()) throw DomainError("Pi: empty profile set");
  double r = norm(y);
  if (r == 0.0) return -1;
  if (profiles.size() == 1) return 0;
  double best = INFINITY, second = INFINITY;
  std::ptrdiff_t arg = -1;
  for (std::size_t i = 0; i < profiles.size(); ++i) {
    const Vec& w = profiles[i].direction();
    double acc = 0.0;
    for (std::size_t k = 0; k < w.size(); ++k) {
      double e = y[k] / r - w[k];
      acc += e * e;
    }
    double dist = std::sqrt(acc);
    if (dist < best) {
      second = best;
      best = dist;
      arg = static_cast<std::ptrdiff_t>(i);
    } else if (dist < second) {
      second = dist;
    }
  }
  if (second - best <= kProfileTol) return -1;
  return arg;
}

Profile Pi(const Vec& y, const ProfileSet& profiles) {
  auto i = nearest_index(y, profiles);
  if (i < 0) return Profile::zero(profiles.dim());
  return profiles[static_cast<std::size_t>(i)];
}

}  // namespace declab
