#pragma once

// Cadlag path representations on [0,1] and the graph primitives used by the
// distance computations.

#include <cstddef>
#include <span>
#include <variant>
#include <vector>

namespace declab {

using Vec = std::vector<double>;

enum class Side { Right, Left };

// Finite-jump cadlag function [0,1] -> R^d.
//
// Values are stored as post-jump states, flattened row-major: state k occupies
// values_[k*dim, (k+1)*dim), state 0 is u(0). Jump times lie in (0,1] and are
// strictly increasing; a jump at t = 1 sets the terminal value u(1) != u(1-).
// A "jump" may have zero size; such breakpoints are not discontinuities.
class StepPath {
 public:
  StepPath(std::size_t dim, Vec u0);
  StepPath(std::size_t dim, std::vector<double> times, std::vector<double> flat_values);

  static StepPath constant(const Vec& value) { return StepPath(value.size(), value); }
  // Scalar convenience: values[0] at t=0, values[k] after the k-th jump.
  static StepPath scalar(std::vector<double> times, std::vector<double> values);

  std::size_t dim() const noexcept { return dim_; }
  std::size_t jump_count() const noexcept { return times_.size(); }
  std::size_t state_count() const noexcept { return times_.size() + 1; }
  std::span<const double> times() const noexcept { return times_; }
  std::span<const double> flat_values() const noexcept { return values_; }
  std::span<const double> state(std::size_t k) const {
    return {values_.data() + k * dim_, dim_};
  }
  Vec state_vec(std::size_t k) const;
  Vec initial() const { return state_vec(0); }
  Vec terminal() const { return state_vec(times_.size()); }

  // Index of the state in force at time t (right-continuous), i.e. the number
  // of jump times <= t. With Side::Left, the number of jump times < t.
  std::size_t state_index(double t, Side side = Side::Right) const;
  Vec evaluate(double t, Side side = Side::Right) const;

  // Times of nonzero jumps, i.e. Disc_u (including t = 1 when u(1) != u(1-)).
  std::vector<double> discontinuities() const;

  friend bool operator==(const StepPath&, const StepPath&) = default;

 private:
  void validate() const;

  std::size_t dim_;
  std::vector<double> times_;
  std::vector<double> values_;
};

// Continuous piecewise-linear path through breakpoints (t_k, v_k) with
// t_0 = 0 < t_1 < ... < t_m = 1.
class PolylinePath {
 public:
  PolylinePath(std::size_t dim, std::vector<double> times, std::vector<double> flat_values);

  // Straight segment from a at t=0 to b at t=1.
  static PolylinePath segment(const Vec& a, const Vec& b);

  std::size_t dim() const noexcept { return dim_; }
  std::size_t point_count() const noexcept { return times_.size(); }
  std::span<const double> times() const noexcept { return times_; }
  std::span<const double> flat_values() const noexcept { return values_; }
  std::span<const double> point(std::size_t k) const {
    return {values_.data() + k * dim_, dim_};
  }
  Vec point_vec(std::size_t k) const;

  Vec evaluate(double t) const;

  friend bool operator==(const PolylinePath&, const PolylinePath&) = default;

 private:
  void validate() const;

  std::size_t dim_;
  std::vector<double> times_;
  std::vector<double> values_;
};

using Path = std::variant<StepPath, PolylinePath>;

std::size_t dim(const Path& u);
bool is_step(const Path& u);

// u(t) for side = Right, u(t-) for side = Left. Left limits at t = 0 are a
// DomainError.
Vec evaluate(const Path& u, double t, Side side = Side::Right);

// Pointwise scale * u(t) + offset. Jump times (or breakpoints) are unchanged.
Path affine_transform(const Path& u, double scale, const Vec& offset);
StepPath affine_transform(const StepPath& u, double scale, const Vec& offset);
PolylinePath affine_transform(const PolylinePath& u, double scale, const Vec& offset);

// Adds the linear function t -> t * drift. Polylines stay exact. A step path
// with nonzero drift is discretised on the union of its own jump times and a
// uniform grid of `grid` cells; the sup error is |drift| / grid. The terminal
// value is exact.
Path add_linear_drift(const Path& u, const Vec& drift, std::size_t grid = 4096);

// Explicit conversion of a polyline to a step path whose consecutive values
// differ by at most `max_value_step` (Euclidean). Under the reparametrisation
// quotient the two are within max_value_step / 2 of each other.
StepPath to_step(const PolylinePath& p, double max_value_step);

// Same path with its terminal value (last state / last breakpoint) replaced.
Path with_terminal(const Path& u, const Vec& value);

// Supremum over t of |u(t)| (Euclidean); exact for both representations.
double sup_norm(const Path& u);

// ---------------------------------------------------------------------------
// Graph geometry in [0,1] x R^d.

// Segment between p and q in R^{1+d}; coordinate 0 is time.
struct Segment {
  Vec p;
  Vec q;
};

// {t} x prod_k [lo_k, hi_k].
struct TimeBox {
  double t;
  Vec lo;
  Vec hi;
};

using Primitive = std::variant<Segment, TimeBox>;

struct GraphSet {
  std::size_t dim = 0;  // d; primitives live in R^{1+d}
  std::vector<Primitive> primitives;

  bool empty() const noexcept { return primitives.empty(); }
};

// Euclidean distance in R^{1+d} from a point to a primitive.
double distance(std::span<const double> point, const Primitive& prim);

enum class Completion { Box, Segment };

// Completed graph: constant pieces as horizontal segments; each discontinuity
// filled by a vertical segment (Segment) or the product box [[u(t-),u(t)]]
// (Box). Polylines contribute their own segments.
GraphSet completed_graph(const Path& u, Completion completion);

// ---------------------------------------------------------------------------

// Path with P(0) = 0 and |P(1)| = 1; |P(1)| = 0 is reserved for the zero
// profile.
class Profile {
 public:
  explicit Profile(Path path);
  static Profile zero(std::size_t dim);
  // t -> t * omega.
  static Profile linear(const Vec& omega);

  const Path& path() const noexcept { return path_; }
  const Vec& direction() const noexcept { return direction_; }
  std::size_t dim() const noexcept { return direction_.size(); }
  bool is_zero() const noexcept;

 private:
  Path path_;
  Vec direction_;
};

// Finite family of profiles with pairwise distinct terminal directions.
class ProfileSet {
 public:
  ProfileSet() = default;
  explicit ProfileSet(std::vector<Profile> profiles);

  std::size_t size() const noexcept { return profiles_.size(); }
  bool empty() const noexcept { return profiles_.empty(); }
  std::size_t dim() const;
  const Profile& operator[](std::size_t i) const { return profiles_[i]; }
  const std::vector<Profile>& profiles() const noexcept { return profiles_; }

  // Index of the profile whose direction equals omega (within 1e-12).
  std::ptrdiff_t find(const Vec& omega) const;

 private:
  std::vector<Profile> profiles_;
};

// Nearest-direction selector: the profile whose direction is closest to
// y/|y|; the zero profile for y = 0 or for ties within 1e-12.
// Index into `profiles`, or -1 for the zero profile.
std::ptrdiff_t nearest_index(const Vec& y, const ProfileSet& profiles);
Profile Pi(const Vec& y, const ProfileSet& profiles);

double norm(std::span<const double> v);

}  // namespace declab
