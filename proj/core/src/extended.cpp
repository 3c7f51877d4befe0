#include "extended.hpp"

#include <algorithm>
#include <boost/multiprecision/cpp_bin_float.hpp>
#include <cmath>
#include <limits>
#include <vector>

#include "declab/errors.hpp"

namespace declab::detail {

namespace {

using Quad = boost::multiprecision::cpp_bin_float_quad;

Quad from_u128(unsigned __int128 u) {
  return ldexp(Quad(static_cast<std::uint64_t>(u >> 64)), 64) + Quad(static_cast<std::uint64_t>(u));
}

struct Evaluator {
  Quad neg_inv_alpha;
  Quad ternary_denominator;  // 8 3^kWideDigits

  Quad operator()(const Orbit& o) const {
    if (const auto* b = std::get_if<BinaryShiftCursor>(&o.cursor())) {
      const auto w = b->wide_point();
      if (w.hi == 0) throw DomainError("power-pole observable: orbit hit the pole");
      const Quad x = ldexp(ldexp(Quad(w.hi), 64) + Quad(w.lo), -128 - static_cast<int>(w.lead));
      return pow(x, neg_inv_alpha);
    }
    const auto& t = std::get<TernaryShiftCursor>(o.cursor());
    Quad out = 0;
    for (int num : {1, 3}) {
      const auto off = t.wide_offset_from_eighth(num);
      if (off.pole || off.num == 0) throw DomainError("two-pole observable: orbit hit a pole");
      const unsigned __int128 mag = off.num < 0 ? static_cast<unsigned __int128>(-off.num) : static_cast<unsigned __int128>(off.num);
      const Quad a = from_u128(mag) / (ternary_denominator * pow(Quad(3), static_cast<int>(off.matched)));
      out += (num == 1 ? 1 : -1) * pow(a, neg_inv_alpha);
    }
    return out;
  }
};

}  // namespace

double extended_excursion_distance(const InducedScheme& s, Orbit o) {
  const int base = s.geometric_base();
  if (base != 2 && base != 3) throw UnsupportedError("extended distance: needs a canonical doubling or tripling scheme");
  if (std::holds_alternative<FloatCursor>(o.cursor())) throw UnsupportedError("extended distance: needs a symbolic orbit");

  const Quad inv_alpha = Quad(1) / Quad(s.alpha());
  Evaluator v{-inv_alpha, 8 * pow(Quad(3), static_cast<int>(TernaryShiftCursor::kWideDigits))};

  if (!s.in_X(o)) throw DomainError("excursion must start in X");
  std::vector<Quad> xi{Quad(0)};
  do {
    xi.push_back(xi.back() + v(o));
    o.step();
    if (xi.size() > s.options().return_cap) throw NonReturnError("no return to X within the cap", xi.size() - 1);
  } while (!s.in_X(o));

  const Quad V = xi.back();
  const Quad r = (base == 3 ? -1 : 1) * pow(Quad(base), -inv_alpha);
  std::vector<Quad> zeta{Quad(0)};
  Quad rj = r;
  for (int j = 1; j < 10000 && abs(V * rj) > Quad(1e-12); ++j, rj *= r) zeta.push_back(V * (1 - rj));
  zeta.push_back(V);

  // Discrete Frechet distance over the state sequences.
  const std::size_t q = zeta.size();
  std::vector<double> prev(q), cur(q);
  auto cost = [&](std::size_t i, std::size_t j) { return static_cast<double>(abs(xi[i] - zeta[j])); };
  for (std::size_t j = 0; j < q; ++j) prev[j] = std::max(j ? prev[j - 1] : 0.0, cost(0, j));
  for (std::size_t i = 1; i < xi.size(); ++i) {
    cur[0] = std::max(prev[0], cost(i, 0));
    for (std::size_t j = 1; j < q; ++j) cur[j] = std::max(std::min({prev[j], prev[j - 1], cur[j - 1]}), cost(i, j));
    std::swap(prev, cur);
  }
  return prev[q - 1];
}

}  // namespace declab::detail
