#pragma once

// Interval maps, observables and orbit cursors.
//
// Doubling and tripling orbits are followed symbolically: the point is a digit
// stream (base 2 or 3) and one iterate is a shift, so long orbits do not lose
// precision the way 2x mod 1 does in floating point.

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "declab/paths.hpp"
#include "declab/stable.hpp"

namespace declab {

struct Gauss {};
struct LSV {
  double alpha;
};
struct Doubling {};
struct Tripling {};
// Two neutral fixed points: x(1 + 2^{1/a} x^{1/a}) on [0,1/2),
// 1 - (1-x)(1 + 2^{1/a} (1-x)^{1/a}) on [1/2,1].
struct DoubleLSV {
  double alpha;
};

using MapSpec = std::variant<Gauss, LSV, Doubling, Tripling, DoubleLSV>;

std::string map_name(const MapSpec& m);
// Names: gauss, lsv, doubling, tripling, double-lsv. alpha is used by lsv and
// double-lsv and must lie in (1,2) there.
MapSpec parse_map(const std::string& name, double alpha);

// One iterate in double precision.
double apply(const MapSpec& m, double x);

// [x, Tx, ..., T^n x] in double precision.
std::vector<double> iterate(const MapSpec& m, double x, std::size_t n);

// v(x) = floor(1/x)
struct GaussDigit {};
// v(x) = x^{-1/alpha}
struct PowerPole {
  double alpha;
};
// v(x) = |x - 1/8|^{-1/alpha} - |x - 3/8|^{-1/alpha}
struct TwoPole {
  double alpha;
};
// v(x) = (1-x) at_zero + x at_one - centering
struct HolderVector {
  Vec at_zero;
  Vec at_one;
  Vec centering;
};

using ObservableSpec = std::variant<GaussDigit, PowerPole, TwoPole, HolderVector>;

std::size_t observable_dim(const ObservableSpec& v);

// ---------------------------------------------------------------------------

// x = 0.b1 b2 b3 ... in base 2. Digits past a given prefix come from an owned
// generator, so copies of a cursor follow the same orbit.
class BinaryShiftCursor {
 public:
  BinaryShiftCursor(std::uint64_t seed, std::vector<int> prefix = {});
  // Exact binary expansion of x in [0,1), followed by zeros.
  explicit BinaryShiftCursor(double x);

  int digit(std::size_t i) const;  // i >= 1
  void step();
  // x with relative error below 2^-52 (0 only if the remaining digits are
  // all zero within the generated range).
  double point() const;
  // x = 2^-lead (hi 2^64 + lo) 2^-128 with the top bit of hi set; hi = lo = 0
  // when x is 0 within the generated range.
  struct Wide {
    std::size_t lead = 0;
    std::uint64_t hi = 0, lo = 0;
  };
  Wide wide_point() const;

 private:
  void ensure(std::size_t bits) const;
  std::uint64_t word_at(std::size_t bit) const;  // 64 bits starting at absolute bit index
  bool exact_zero() const;                         // exact expansion with no 1 digit left

  mutable Rng rng_;
  mutable std::vector<std::uint64_t> words_;
  bool random_tail_ = true;
  std::size_t pos_ = 0;  // absolute index of digit b1
};

// x = 0.d1 d2 d3 ... in base 3.
class TernaryShiftCursor {
 public:
  TernaryShiftCursor(std::uint64_t seed, std::vector<int> prefix = {});
  // Exact ternary expansion of the dyadic rational x in [0,1) (x >= 2^-70 or 0).
  explicit TernaryShiftCursor(double x);

  int digit(std::size_t i) const;  // i >= 1
  void step();
  double point() const;
  // x - p for p = 1/8 or 3/8, with full relative precision.
  double offset_from_eighth(int numerator) const;
  // x - p = 3^-matched num / (8 3^kWideDigits); pole when x matches p over
  // the whole search range.
  static constexpr std::size_t kWideDigits = 70;
  struct WideOffset {
    std::size_t matched = 0;
    __int128 num = 0;
    bool pole = false;
  };
  WideOffset wide_offset_from_eighth(int numerator) const;

 private:
  void ensure(std::size_t digits) const;

  mutable Rng rng_;
  mutable std::vector<std::uint8_t> digits_;
  bool random_tail_ = true;
  mutable unsigned __int128 num_ = 0;  // exact-expansion state: remainder / 2^shift_
  int shift_ = 0;
  std::size_t pos_ = 0;
};

class FloatCursor {
 public:
  FloatCursor(MapSpec map, double x) : map_(std::move(map)), x_(x) {}
  void step() { x_ = declab::apply(map_, x_); }
  double point() const { return x_; }

 private:
  MapSpec map_;
  double x_;
};

class Orbit {
 public:
  using Cursor = std::variant<BinaryShiftCursor, TernaryShiftCursor, FloatCursor>;

  explicit Orbit(Cursor c) : c_(std::move(c)) {}

  void step() {
    std::visit([](auto& c) { c.step(); }, c_);
  }
  double point() const {
    return std::visit([](const auto& c) { return c.point(); }, c_);
  }
  const Cursor& cursor() const noexcept { return c_; }

 private:
  Cursor c_;
};

// Orbit of x under m: symbolic for doubling/tripling, floating otherwise.
Orbit make_orbit(const MapSpec& m, double x);

// Writes v(current point) into out[0..dim).
void observe(const ObservableSpec& v, const Orbit& o, double* out);
double observe_scalar(const ObservableSpec& v, const Orbit& o);

}  // namespace declab
