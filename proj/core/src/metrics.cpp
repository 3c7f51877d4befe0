#include "declab/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "declab/errors.hpp"

namespace declab {

const char* to_string(Method m) {
  switch (m) {
    case Method::Exact: return "exact";
    case Method::Sampled: return "sampled";
    case Method::Bracket: return "bracket";
  }
  return "?";
}

const char* to_string(Mode m) {
  switch (m) {
    case Mode::M1: return "M1";
    case Mode::M2: return "M2";
    case Mode::None: return "NONE";
  }
  return "?";
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::pair<double, double> time_range(const Primitive& prim) {
  if (const auto* s = std::get_if<Segment>(&prim)) return std::minmax(s->p[0], s->q[0]);
  double t = std::get<TimeBox>(prim).t;
  return {t, t};
}

// Primitives bucketed by time so that a nearest-primitive query only visits
// buckets whose time gap is below the current best distance.
class TimeIndex {
 public:
  explicit TimeIndex(const GraphSet& g) : g_(g) {
    t0_ = kInf;
    double t1 = -kInf;
    for (const auto& p : g.primitives) {
      auto [lo, hi] = time_range(p);
      t0_ = std::min(t0_, lo);
      t1 = std::max(t1, hi);
    }
    std::size_t n = g.primitives.size();
    buckets_ = t1 > t0_ ? std::clamp<std::size_t>(n, 1, std::size_t{1} << 22) : 1;
    width_ = t1 > t0_ ? (t1 - t0_) / static_cast<double>(buckets_) : 1.0;
    cells_.resize(buckets_);
    for (std::size_t k = 0; k < n; ++k) {
      auto [lo, hi] = time_range(g.primitives[k]);
      for (std::size_t b = bucket_of(lo); b <= bucket_of(hi); ++b) cells_[b].push_back(static_cast<std::uint32_t>(k));
    }
  }

  // Distance from x to the set; exact whenever the result exceeds `floor`,
  // otherwise some value <= floor.
  // `nearest` receives the index of the primitive attaining the returned value.
  double query(std::span<const double> x, double floor, std::size_t* nearest = nullptr) const {
    const double t = x[0];
    const std::size_t home = bucket_of(t);
    double best = kInf;
    for (std::size_t ring = 0;; ++ring) {
      bool any = false;
      double gap_min = kInf;
      for (int side = 0; side < (ring == 0 ? 1 : 2); ++side) {
        std::ptrdiff_t b = side == 0 ? static_cast<std::ptrdiff_t>(home) + static_cast<std::ptrdiff_t>(ring)
                                     : static_cast<std::ptrdiff_t>(home) - static_cast<std::ptrdiff_t>(ring);
        if (b < 0 || b >= static_cast<std::ptrdiff_t>(buckets_)) continue;
        any = true;
        double lo = t0_ + width_ * static_cast<double>(b), hi = lo + width_;
        double gap = t < lo ? lo - t : (t > hi ? t - hi : 0.0);
        gap_min = std::min(gap_min, gap);
        if (gap >= best) continue;
        for (std::uint32_t k : cells_[static_cast<std::size_t>(b)]) {
          const double dk = distance(x, g_.primitives[k]);
          if (dk < best) {
            best = dk;
            if (nearest) *nearest = k;
          }
          if (best <= floor) return best;
        }
      }
      if (!any || gap_min >= best) break;
    }
    return best;
  }

 private:
  std::size_t bucket_of(double t) const {
    double r = std::floor((t - t0_) / width_);
    if (!(r > 0.0)) return 0;
    return std::min(buckets_ - 1, static_cast<std::size_t>(r));
  }

  const GraphSet& g_;

 public:
  const Primitive& primitive(std::size_t k) const { return g_.primitives[k]; }

 private:
  double t0_ = 0.0, width_ = 1.0;
  std::size_t buckets_ = 1;
  std::vector<std::vector<std::uint32_t>> cells_;
};

// Directed Hausdorff distance sup_{x in from} dist(x, to) by branch and bound.
// Each primitive is split into cells (segment pieces or sub-boxes) with a
// center c and radius r. dist(., to) is 1-Lipschitz, so a cell can be dropped
// once dist(c, to) + r <= worst + delta/2, where worst is the largest exact
// center distance found so far. The result lies in [true - delta/2, true].
struct Cell {
  std::size_t prim;
  Vec lo, hi;  // parameter ranges: [w0,w1] for a segment, value box for a TimeBox
};

double cell_center(const Primitive& prim, const Cell& c, std::vector<double>& x) {
  if (const auto* s = std::get_if<Segment>(&prim)) {
    const std::size_t n = s->p.size();
    const double w = 0.5 * (c.lo[0] + c.hi[0]);
    double len = 0.0;
    x.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      x[i] = s->p[i] + w * (s->q[i] - s->p[i]);
      len += (s->q[i] - s->p[i]) * (s->q[i] - s->p[i]);
    }
    return 0.5 * (c.hi[0] - c.lo[0]) * std::sqrt(len);
  }
  const auto& b = std::get<TimeBox>(prim);
  x.resize(c.lo.size() + 1);
  x[0] = b.t;
  double r = 0.0;
  for (std::size_t i = 0; i < c.lo.size(); ++i) {
    x[i + 1] = 0.5 * (c.lo[i] + c.hi[i]);
    r += (c.hi[i] - c.lo[i]) * (c.hi[i] - c.lo[i]);
  }
  return 0.5 * std::sqrt(r);
}

// max over the cell's vertices of dist(vertex, p): an upper bound on
// sup_{x in cell} dist(x, p) because distance to a convex set is convex.
double vertex_bound(const Primitive& prim, const Cell& c, const Primitive& p, std::vector<double>& v) {
  if (const auto* s = std::get_if<Segment>(&prim)) {
    const std::size_t n = s->p.size();
    v.resize(n);
    double out = 0.0;
    for (double w : {c.lo[0], c.hi[0]}) {
      for (std::size_t i = 0; i < n; ++i) v[i] = s->p[i] + w * (s->q[i] - s->p[i]);
      out = std::max(out, distance(v, p));
    }
    return out;
  }
  const std::size_t d = c.lo.size();
  v.resize(d + 1);
  v[0] = std::get<TimeBox>(prim).t;
  double out = 0.0;
  for (std::size_t mask = 0; mask < (std::size_t{1} << d); ++mask) {
    for (std::size_t i = 0; i < d; ++i) v[i + 1] = (mask >> i) & 1 ? c.hi[i] : c.lo[i];
    out = std::max(out, distance(v, p));
  }
  return out;
}

Cell root_cell(const Primitive& prim, std::size_t k) {
  if (std::holds_alternative<Segment>(prim)) return {k, {0.0}, {1.0}};
  const auto& b = std::get<TimeBox>(prim);
  return {k, b.lo, b.hi};
}

double directed(const GraphSet& from, const TimeIndex& to, double delta) {
  double worst = 0.0;
  std::vector<double> x, v;
  // Seed the running maximum with every primitive's center.
  for (std::size_t k = 0; k < from.primitives.size(); ++k) {
    cell_center(from.primitives[k], root_cell(from.primitives[k], k), x);
    worst = std::max(worst, to.query(x, worst));
  }
  std::vector<Cell> stack;
  for (std::size_t k = 0; k < from.primitives.size(); ++k) {
    stack.push_back(root_cell(from.primitives[k], k));
    while (!stack.empty()) {
      Cell c = std::move(stack.back());
      stack.pop_back();
      const double r = cell_center(from.primitives[c.prim], c, x);
      // Below `floor` the query may stop at any upper bound; above it the
      // value is exact.
      const double floor = std::max(worst, worst + delta / 2.0 - r);
      std::size_t nearest = 0;
      const double m = to.query(x, floor, &nearest);
      if (m <= floor) {
        if (m + r <= worst + delta / 2.0) continue;
      } else {
        worst = m;
        if (r <= delta / 2.0) continue;
      }
      if (vertex_bound(from.primitives[c.prim], c, to.primitive(nearest), v) <= worst + delta / 2.0) continue;
      std::size_t axis = 0;
      for (std::size_t i = 1; i < c.lo.size(); ++i)
        if (c.hi[i] - c.lo[i] > c.hi[axis] - c.lo[axis]) axis = i;
      const double mid = 0.5 * (c.lo[axis] + c.hi[axis]);
      Cell right = c;
      right.lo[axis] = mid;
      c.hi[axis] = mid;
      stack.push_back(std::move(right));
      stack.push_back(std::move(c));
    }
  }
  return worst;
}

// Drops consecutive repeated states; the Frechet distance is unchanged.
std::vector<double> collapsed_values(const StepPath& u) {
  const std::size_t d = u.dim();
  std::vector<double> out(u.state(0).begin(), u.state(0).end());
  for (std::size_t k = 1; k < u.state_count(); ++k) {
    auto s = u.state(k);
    if (!std::equal(s.begin(), s.end(), out.end() - static_cast<std::ptrdiff_t>(d))) out.insert(out.end(), s.begin(), s.end());
  }
  return out;
}

double frechet_1d(std::span<const double> a, std::span<const double> b) {
  const std::size_t q = b.size();
  std::vector<double> row(q);
  row[0] = std::abs(a[0] - b[0]);
  for (std::size_t j = 1; j < q; ++j) row[j] = std::max(row[j - 1], std::abs(a[0] - b[j]));
  for (std::size_t i = 1; i < a.size(); ++i) {
    const double ai = a[i];
    double diag = row[0];
    double left = std::max(row[0], std::abs(ai - b[0]));
    row[0] = left;
    for (std::size_t j = 1; j < q; ++j) {
      const double up = row[j];
      const double c = std::abs(ai - b[j]);
      left = std::max(c, std::min(std::min(up, diag), left));
      diag = up;
      row[j] = left;
    }
  }
  return row[q - 1];
}

double frechet_nd(std::span<const double> a, std::span<const double> b, std::size_t d) {
  const std::size_t p = a.size() / d, q = b.size() / d;
  auto cost = [&](std::size_t i, std::size_t j) {
    double s = 0.0;
    for (std::size_t k = 0; k < d; ++k) {
      double e = a[i * d + k] - b[j * d + k];
      s += e * e;
    }
    return s;
  };
  std::vector<double> row(q);
  row[0] = cost(0, 0);
  for (std::size_t j = 1; j < q; ++j) row[j] = std::max(row[j - 1], cost(0, j));
  for (std::size_t i = 1; i < p; ++i) {
    double diag = row[0];
    double left = std::max(row[0], cost(i, 0));
    row[0] = left;
    for (std::size_t j = 1; j < q; ++j) {
      const double up = row[j];
      left = std::max(cost(i, j), std::min(std::min(up, diag), left));
      diag = up;
      row[j] = left;
    }
  }
  return std::sqrt(row[q - 1]);
}

std::vector<double> breakpoints(const Path& u) {
  auto t = std::visit([](const auto& p) { return p.times(); }, u);
  return {t.begin(), t.end()};
}

double dist_vec(const Vec& a, const Vec& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

}  // namespace

MetricResult hausdorff(const GraphSet& a, const GraphSet& b, double delta) {
  if (a.empty() || b.empty()) throw DomainError("hausdorff: empty GraphSet");
  if (!(delta > 0.0)) throw DomainError("hausdorff: delta must be positive");
  if (a.dim != b.dim) throw DomainError("hausdorff: dimension mismatch");
  TimeIndex ia(a), ib(b);
  double h = std::max(directed(a, ib, delta), directed(b, ia, delta));
  return {h, delta / 2.0, Method::Sampled};
}

double discrete_frechet(std::span<const double> a, std::span<const double> b, std::size_t dim) {
  if (dim == 0 || a.empty() || b.empty() || a.size() % dim || b.size() % dim)
    throw DomainError("discrete_frechet: malformed sequences");
  return dim == 1 ? frechet_1d(a, b) : frechet_nd(a, b, dim);
}

MetricResult d_tildeD(const StepPath& u1, const StepPath& u2) {
  if (u1.dim() != u2.dim()) throw DomainError("d_tildeD: dimension mismatch");
  auto a = collapsed_values(u1), b = collapsed_values(u2);
  return {discrete_frechet(a, b, u1.dim()), 0.0, Method::Exact};
}

MetricResult d_M2(const Path& u1, const Path& u2, double delta) {
  if (dim(u1) != dim(u2)) throw DomainError("d_M2: dimension mismatch");
  return hausdorff(completed_graph(u1, Completion::Segment), completed_graph(u2, Completion::Segment), delta);
}

std::pair<double, double> d_J1_bracket(const StepPath& u1, const StepPath& u2) {
  if (u1.dim() != u2.dim()) throw DomainError("d_J1_bracket: dimension mismatch");
  const std::size_t d = u1.dim();
  // Merge zero-size jumps; keep the jump time of each surviving state.
  auto reduce = [d](const StepPath& u, std::vector<double>& vals, std::vector<double>& start) {
    vals.assign(u.state(0).begin(), u.state(0).end());
    start.assign(1, 0.0);
    for (std::size_t k = 1; k < u.state_count(); ++k) {
      auto s = u.state(k);
      if (std::equal(s.begin(), s.end(), vals.end() - static_cast<std::ptrdiff_t>(d))) continue;
      vals.insert(vals.end(), s.begin(), s.end());
      start.push_back(u.times()[k - 1]);
    }
    start.push_back(1.0);  // sentinel: end of the last state
  };
  std::vector<double> va, ta, vb, tb;
  reduce(u1, va, ta);
  reduce(u2, vb, tb);
  const std::size_t p = ta.size() - 1, q = tb.size() - 1;
  auto mismatch = [&](std::size_t i, std::size_t j) {
    double s = 0.0;
    for (std::size_t k = 0; k < d; ++k) s += (va[i * d + k] - vb[j * d + k]) * (va[i * d + k] - vb[j * d + k]);
    return std::sqrt(s);
  };
  // Distance from t to the open interval (lo, hi); infinite if it is empty.
  auto to_interval = [](double t, double lo, double hi) {
    if (!(hi > lo)) return kInf;
    return std::max({0.0, lo - t, t - hi});
  };
  std::vector<double> prev(q, kInf), cur(q, kInf);
  for (std::size_t i = 0; i < p; ++i) {
    for (std::size_t j = 0; j < q; ++j) {
      double best = kInf;
      if (i == 0 && j == 0) best = 0.0;
      if (i > 0 && j > 0) best = std::min(best, std::max(prev[j - 1], std::abs(ta[i] - tb[j])));
      if (i > 0) best = std::min(best, std::max(prev[j], to_interval(ta[i], tb[j], tb[j + 1])));
      if (j > 0) best = std::min(best, std::max(cur[j - 1], to_interval(tb[j], ta[i], ta[i + 1])));
      cur[j] = std::max(best, mismatch(i, j));
    }
    std::swap(prev, cur);
  }
  double m = prev[q - 1];
  return {m, 2.0 * m};
}

double sup_distance(const Path& u1, const Path& u2) {
  if (dim(u1) != dim(u2)) throw DomainError("sup_distance: dimension mismatch");
  auto t = breakpoints(u1);
  auto t2 = breakpoints(u2);
  t.insert(t.end(), t2.begin(), t2.end());
  t.push_back(0.0);
  t.push_back(1.0);
  std::sort(t.begin(), t.end());
  t.erase(std::unique(t.begin(), t.end()), t.end());
  // Between consecutive breakpoints the difference is affine, so the sup is
  // attained at a right value or a left limit.
  double m = 0.0;
  for (double s : t) {
    m = std::max(m, dist_vec(evaluate(u1, s), evaluate(u2, s)));
    if (s > 0.0) m = std::max(m, dist_vec(evaluate(u1, s, Side::Left), evaluate(u2, s, Side::Left)));
  }
  return m;
}

Mode classify_profile_mode(const Profile& p, double tol) {
  if (p.is_zero()) throw DomainError("classify_profile_mode: zero terminal direction");
  const Vec& w = p.direction();
  const std::size_t d = w.size();
  auto flat = std::visit([](const auto& x) { return x.flat_values(); }, p.path());
  std::vector<double> phi;
  for (std::size_t k = 0; k < flat.size(); k += d) {
    double f = 0.0;
    for (std::size_t i = 0; i < d; ++i) f += flat[k + i] * w[i];
    double r = 0.0;
    for (std::size_t i = 0; i < d; ++i) r += (flat[k + i] - f * w[i]) * (flat[k + i] - f * w[i]);
    if (std::sqrt(r) > tol || f < -tol || f > 1.0 + tol) return Mode::None;
    phi.push_back(f);
  }
  // Monotone up to tol: no value falls more than tol below the running max.
  double run = -kInf;
  for (double f : phi) {
    if (f < run - tol) return Mode::M2;
    run = std::max(run, f);
  }
  return Mode::M1;
}

}  // namespace declab
