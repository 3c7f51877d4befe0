#include "declab/orbit.hpp"

#include <bit>
#include <cmath>

#include "declab/errors.hpp"

namespace declab {

namespace {

constexpr std::size_t kCompactBits = std::size_t{1} << 16;
constexpr std::uint64_t kPow3_40 = 12157665459056928801ull;  // 3^40
constexpr std::int64_t kPow3_34 = 16677181699666569ll;       // 3^34
constexpr std::size_t kWindow = 34;
constexpr std::size_t kMaxMatch = 4096;

void check_unit(double x, const char* who) {
  if (!(x >= 0.0 && x <= 1.0)) throw DomainError(std::string(who) + ": point outside [0,1]");
}

double lsv_branch(double x, double alpha) {
  return x * (1.0 + std::pow(2.0 * x, 1.0 / alpha));
}

}  // namespace

std::string map_name(const MapSpec& m) {
  struct {
    std::string operator()(const Gauss&) const { return "gauss"; }
    std::string operator()(const LSV&) const { return "lsv"; }
    std::string operator()(const Doubling&) const { return "doubling"; }
    std::string operator()(const Tripling&) const { return "tripling"; }
    std::string operator()(const DoubleLSV&) const { return "double-lsv"; }
  } v;
  return std::visit(v, m);
}

MapSpec parse_map(const std::string& name, double alpha) {
  auto intermittent = [&](const char* what) {
    if (!(alpha > 1.0 && alpha < 2.0)) throw DomainError(std::string(what) + ": alpha must lie in (1,2)");
  };
  if (name == "gauss") return Gauss{};
  if (name == "doubling") return Doubling{};
  if (name == "tripling") return Tripling{};
  if (name == "lsv") {
    intermittent("lsv");
    return LSV{alpha};
  }
  if (name == "double-lsv") {
    intermittent("double-lsv");
    return DoubleLSV{alpha};
  }
  throw DomainError("unknown map '" + name + "'");
}

double apply(const MapSpec& m, double x) {
  if (std::holds_alternative<Gauss>(m)) {
    if (!(x > 0.0 && x < 1.0)) throw DomainError("gauss: point outside (0,1)");
    double y = 1.0 / x;
    return y - std::floor(y);
  }
  check_unit(x, "iterate");
  if (const auto* l = std::get_if<LSV>(&m)) return x < 0.5 ? lsv_branch(x, l->alpha) : 2.0 * x - 1.0;
  if (const auto* l = std::get_if<DoubleLSV>(&m))
    return x < 0.5 ? lsv_branch(x, l->alpha) : 1.0 - lsv_branch(1.0 - x, l->alpha);
  const double k = std::holds_alternative<Doubling>(m) ? 2.0 : 3.0;
  double y = k * x;
  return y - std::floor(y);
}

std::vector<double> iterate(const MapSpec& m, double x, std::size_t n) {
  std::vector<double> out{x};
  out.reserve(n + 1);
  if (std::holds_alternative<Gauss>(m)) {
    if (!(x > 0.0 && x < 1.0)) throw DomainError("gauss: point outside (0,1)");
  } else {
    check_unit(x, "iterate");
  }
  for (std::size_t k = 0; k < n; ++k) out.push_back(declab::apply(m, out.back()));
  return out;
}

std::size_t observable_dim(const ObservableSpec& v) {
  if (const auto* h = std::get_if<HolderVector>(&v)) return h->at_zero.size();
  return 1;
}

// ---------------------------------------------------------------------------
// BinaryShiftCursor

BinaryShiftCursor::BinaryShiftCursor(std::uint64_t seed, std::vector<int> prefix) : rng_(seed) {
  ensure(prefix.size());
  for (std::size_t i = 0; i < prefix.size(); ++i) {
    const std::uint64_t mask = std::uint64_t{1} << (63 - i % 64);
    if (prefix[i]) words_[i / 64] |= mask;
    else words_[i / 64] &= ~mask;
  }
}

BinaryShiftCursor::BinaryShiftCursor(double x) : random_tail_(false) {
  if (!(x >= 0.0 && x < 1.0)) throw DomainError("binary cursor: point outside [0,1)");
  double r = x;
  while (r != 0.0) {
    double y = std::ldexp(r, 64);
    double w = std::floor(y);
    words_.push_back(static_cast<std::uint64_t>(w));
    r = y - w;
  }
}

void BinaryShiftCursor::ensure(std::size_t bits) const {
  while (words_.size() * 64 < bits) words_.push_back(random_tail_ ? rng_() : 0);
}

std::uint64_t BinaryShiftCursor::word_at(std::size_t bit) const {
  ensure(bit + 128);
  const std::size_t w = bit / 64, o = bit % 64;
  return o == 0 ? words_[w] : (words_[w] << o) | (words_[w + 1] >> (64 - o));
}

int BinaryShiftCursor::digit(std::size_t i) const {
  if (i == 0) throw DomainError("digit index starts at 1");
  const std::size_t b = pos_ + i - 1;
  ensure(b + 1);
  return static_cast<int>((words_[b / 64] >> (63 - b % 64)) & 1u);
}

void BinaryShiftCursor::step() {
  ++pos_;
  if (pos_ >= 2 * kCompactBits && words_.size() * 64 > pos_) {
    const std::size_t drop = pos_ / 64 - 1;
    words_.erase(words_.begin(), words_.begin() + static_cast<std::ptrdiff_t>(drop));
    pos_ -= drop * 64;
  }
}

bool BinaryShiftCursor::exact_zero() const {
  if (random_tail_) return false;
  for (std::size_t b = pos_; b < words_.size() * 64; b = (b / 64 + 1) * 64)
    if (words_[b / 64] << (b % 64)) return false;
  return true;
}

double BinaryShiftCursor::point() const {
  if (exact_zero()) return 0.0;
  std::size_t z = 0;
  while (true) {
    std::uint64_t w = word_at(pos_ + z);
    if (w != 0) {
      z += static_cast<std::size_t>(std::countl_zero(w));
      break;
    }
    z += 64;
  }
  const std::uint64_t mant = word_at(pos_ + z) >> 11;
  return std::ldexp(static_cast<double>(mant), -static_cast<int>(z + 53));
}

BinaryShiftCursor::Wide BinaryShiftCursor::wide_point() const {
  Wide w;
  if (exact_zero()) return w;
  std::size_t z = 0;
  while (true) {
    const std::uint64_t x = word_at(pos_ + z);
    if (x != 0) {
      z += static_cast<std::size_t>(std::countl_zero(x));
      break;
    }
    z += 64;
  }
  w.lead = z;
  w.hi = word_at(pos_ + z);
  w.lo = word_at(pos_ + z + 64);
  return w;
}

// ---------------------------------------------------------------------------
// TernaryShiftCursor

TernaryShiftCursor::TernaryShiftCursor(std::uint64_t seed, std::vector<int> prefix) : rng_(seed) {
  ensure(prefix.size());
  for (std::size_t i = 0; i < prefix.size(); ++i) {
    if (prefix[i] < 0 || prefix[i] > 2) throw DomainError("ternary digit out of range");
    digits_[i] = static_cast<std::uint8_t>(prefix[i]);
  }
}

TernaryShiftCursor::TernaryShiftCursor(double x) : random_tail_(false) {
  if (!(x >= 0.0 && x < 1.0)) throw DomainError("ternary cursor: point outside [0,1)");
  if (x == 0.0) return;
  int e = 0;
  double f = std::frexp(x, &e);  // x = f 2^e, f in [1/2, 1)
  shift_ = 53 - e;
  if (shift_ > 125) throw DomainError("ternary cursor: point too small for exact expansion");
  num_ = static_cast<unsigned __int128>(std::ldexp(f, 53));
}

void TernaryShiftCursor::ensure(std::size_t n) const {
  if (digits_.size() >= n) return;
  if (!random_tail_) {
    const unsigned __int128 mask = (static_cast<unsigned __int128>(1) << shift_) - 1;
    while (digits_.size() < n) {
      if (shift_ == 0) {
        digits_.push_back(0);
        continue;
      }
      num_ *= 3;
      digits_.push_back(static_cast<std::uint8_t>(num_ >> shift_));
      num_ &= mask;
    }
    return;
  }
  while (digits_.size() < n) {
    std::uint64_t r;
    do r = rng_();
    while (r >= kPow3_40);
    for (int k = 0; k < 40; ++k) {
      digits_.push_back(static_cast<std::uint8_t>(r % 3));
      r /= 3;
    }
  }
}

int TernaryShiftCursor::digit(std::size_t i) const {
  if (i == 0) throw DomainError("digit index starts at 1");
  ensure(pos_ + i);
  return digits_[pos_ + i - 1];
}

void TernaryShiftCursor::step() {
  ++pos_;
  if (pos_ >= 2 * kCompactBits && digits_.size() > pos_) {
    digits_.erase(digits_.begin(), digits_.begin() + static_cast<std::ptrdiff_t>(pos_));
    pos_ = 0;
  }
}

double TernaryShiftCursor::point() const {
  std::size_t z = 0;
  ensure(pos_ + kWindow);
  while (digits_[pos_ + z] == 0) {
    ++z;
    if (z > kMaxMatch) return 0.0;
    ensure(pos_ + z + kWindow);
  }
  ensure(pos_ + z + kWindow);
  std::int64_t w = 0;
  for (std::size_t i = 0; i < kWindow; ++i) w = 3 * w + digits_[pos_ + z + i];
  return static_cast<double>(w) / static_cast<double>(kPow3_34) * std::pow(3.0, -static_cast<double>(z));
}

double TernaryShiftCursor::offset_from_eighth(int numerator) const {
  if (numerator != 1 && numerator != 3) throw DomainError("offset_from_eighth: numerator must be 1 or 3");
  // 1/8 = 0.(01) and 3/8 = 0.(10) in base 3.
  int expect = numerator == 1 ? 0 : 1;
  std::size_t k = 0;
  while (true) {
    ensure(pos_ + k + 1);
    if (digits_[pos_ + k] != expect) break;
    expect ^= 1;
    if (++k > kMaxMatch) return 0.0;
  }
  // After k matched digits the remaining pattern is 0.(01) if the next
  // expected digit is 0, else 0.(10).
  const std::int64_t c = expect == 0 ? 1 : 3;
  ensure(pos_ + k + kWindow);
  std::int64_t w = 0;
  for (std::size_t i = 0; i < kWindow; ++i) w = 3 * w + digits_[pos_ + k + i];
  const double diff = static_cast<double>(8 * w - c * kPow3_34) / (8.0 * static_cast<double>(kPow3_34));
  return diff * std::pow(3.0, -static_cast<double>(k));
}

TernaryShiftCursor::WideOffset TernaryShiftCursor::wide_offset_from_eighth(int numerator) const {
  if (numerator != 1 && numerator != 3) throw DomainError("offset_from_eighth: numerator must be 1 or 3");
  WideOffset out;
  int expect = numerator == 1 ? 0 : 1;
  std::size_t k = 0;
  while (true) {
    ensure(pos_ + k + 1);
    if (digits_[pos_ + k] != expect) break;
    expect ^= 1;
    if (++k > kMaxMatch) {
      out.pole = true;
      return out;
    }
  }
  ensure(pos_ + k + kWideDigits);
  __int128 w = 0, p3 = 1;
  for (std::size_t i = 0; i < kWideDigits; ++i) {
    w = 3 * w + digits_[pos_ + k + i];
    p3 *= 3;
  }
  out.matched = k;
  out.num = 8 * w - (expect == 0 ? 1 : 3) * p3;
  return out;
}

// ---------------------------------------------------------------------------

Orbit make_orbit(const MapSpec& m, double x) {
  if (std::holds_alternative<Doubling>(m)) return Orbit(BinaryShiftCursor(x == 1.0 ? 0.0 : x));
  if (std::holds_alternative<Tripling>(m)) return Orbit(TernaryShiftCursor(x == 1.0 ? 0.0 : x));
  if (std::holds_alternative<Gauss>(m)) {
    if (!(x > 0.0 && x < 1.0)) throw DomainError("gauss: point outside (0,1)");
  } else {
    check_unit(x, "orbit");
  }
  return Orbit(FloatCursor(m, x));
}

void observe(const ObservableSpec& v, const Orbit& o, double* out) {
  if (const auto* h = std::get_if<HolderVector>(&v)) {
    const double x = o.point();
    for (std::size_t i = 0; i < h->at_zero.size(); ++i)
      out[i] = (1.0 - x) * h->at_zero[i] + x * h->at_one[i] - (h->centering.empty() ? 0.0 : h->centering[i]);
    return;
  }
  out[0] = observe_scalar(v, o);
}

double observe_scalar(const ObservableSpec& v, const Orbit& o) {
  if (std::holds_alternative<GaussDigit>(v)) {
    const double x = o.point();
    if (!(x > 0.0)) throw DomainError("gauss digit: orbit reached 0");
    return std::floor(1.0 / x);
  }
  if (const auto* p = std::get_if<PowerPole>(&v)) {
    const double x = o.point();
    if (!(x > 0.0)) throw DomainError("power pole: orbit reached 0");
    return std::pow(x, -1.0 / p->alpha);
  }
  if (const auto* p = std::get_if<TwoPole>(&v)) {
    double a, b;
    if (const auto* t = std::get_if<TernaryShiftCursor>(&o.cursor())) {
      a = t->offset_from_eighth(1);
      b = t->offset_from_eighth(3);
    } else {
      const double x = o.point();
      a = x - 0.125;
      b = x - 0.375;
    }
    if (a == 0.0 || b == 0.0) throw DomainError("two-pole observable: orbit hit a pole");
    return std::pow(std::abs(a), -1.0 / p->alpha) - std::pow(std::abs(b), -1.0 / p->alpha);
  }
  const auto& h = std::get<HolderVector>(v);
  if (h.at_zero.size() != 1) throw DomainError("observe_scalar: observable is vector valued");
  double out;
  observe(v, o, &out);
  return out;
}

}  // namespace declab
