#include "declab/cusp.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <string>

#include "declab/errors.hpp"

namespace declab {

namespace {

constexpr double kPi = std::numbers::pi;

// Linear interpolation of a tabulated trace at angle th.
void trace_at(const CuspData& d, const std::vector<double>& table, double th, double* out) {
  const auto& g = d.theta;
  auto it = std::upper_bound(g.begin(), g.end(), th);
  std::size_t k = it == g.begin() ? 1 : std::min<std::size_t>(static_cast<std::size_t>(it - g.begin()), g.size() - 1);
  const double t0 = g[k - 1], t1 = g[k];
  const double w = std::clamp((th - t0) / (t1 - t0), 0.0, 1.0);
  for (std::size_t i = 0; i < d.dim; ++i) out[i] = (1.0 - w) * table[(k - 1) * d.dim + i] + w * table[k * d.dim + i];
}

// Cumulative trapezoid values at t = k/m, k = 0..m (flattened).
std::vector<double> cumulative(const CuspData& d, std::size_t m) {
  const double inv_alpha = 1.0 / d.alpha;
  std::vector<double> f((m + 1) * d.dim), a(d.dim), b(d.dim);
  for (std::size_t k = 0; k <= m; ++k) {
    const double th = k == m ? kPi : kPi * static_cast<double>(k) / static_cast<double>(m);
    trace_at(d, d.v_plus, th, a.data());
    trace_at(d, d.v_minus, kPi - th, b.data());
    const double w = std::pow(std::max(0.0, std::sin(th)), inv_alpha);
    for (std::size_t i = 0; i < d.dim; ++i) f[k * d.dim + i] = 0.5 * (a[i] + b[i]) * w;
  }
  const double h = kPi / static_cast<double>(m);
  std::vector<double> P((m + 1) * d.dim, 0.0);
  for (std::size_t k = 1; k <= m; ++k)
    for (std::size_t i = 0; i < d.dim; ++i)
      P[k * d.dim + i] = P[(k - 1) * d.dim + i] + 0.5 * h * (f[(k - 1) * d.dim + i] + f[k * d.dim + i]);
  return P;
}

}  // namespace

double CuspData::alpha_from_beta(double beta) {
  if (!(beta > 2.0)) throw DomainError("cusp: beta must exceed 2");
  return beta / (beta - 1.0);
}

void CuspData::validate() const {
  if (!(alpha > 1.0 && alpha < 2.0)) throw DomainError("cusp: alpha must lie in (1,2)");
  if (dim == 0) throw DomainError("cusp: dim must be positive");
  if (theta.size() < 2) throw DomainError("cusp: need at least two grid angles");
  if (v_plus.size() != theta.size() * dim || v_minus.size() != theta.size() * dim)
    throw DomainError("cusp: traces must be tabulated on the theta grid");
  for (std::size_t k = 1; k < theta.size(); ++k)
    if (!(theta[k] > theta[k - 1])) throw DomainError("cusp: theta grid must be increasing");
  if (theta.front() > 1e-9 || theta.back() < kPi - 1e-9) throw DomainError("cusp: theta grid must cover [0, pi]");
}

CuspProfile cusp_profile(const CuspData& data, std::size_t m) {
  data.validate();
  if (m < 8) throw DomainError("cusp_profile: need at least 8 quadrature cells");
  if (m % 2) ++m;
  const std::size_t d = data.dim;
  const std::vector<double> fine = cumulative(data, m), coarse = cumulative(data, m / 2);

  const double r = norm(std::span<const double>(fine).subspan(m * d, d));
  if (r < 1e-8) throw DegenerateProfileError("cusp_profile: |P(1)| below 1e-8");

  double err = 0.0;
  for (std::size_t k = 0; k <= m / 2; ++k)
    for (std::size_t i = 0; i < d; ++i) err = std::max(err, std::abs(fine[2 * k * d + i] - coarse[k * d + i]));

  std::vector<double> times(m + 1), flat(fine);
  for (std::size_t k = 0; k <= m; ++k) times[k] = k == m ? 1.0 : static_cast<double>(k) / static_cast<double>(m);
  for (double& x : flat) x /= r;
  // Exact unit terminal value.
  const double r2 = norm(std::span<const double>(flat).subspan(m * d, d));
  for (std::size_t i = 0; i < d; ++i) flat[m * d + i] /= r2;
  return {Profile(PolylinePath(d, std::move(times), std::move(flat))), r, err / r};
}

CuspData read_cusp_csv(std::istream& in, double alpha) {
  CuspData d;
  d.alpha = alpha;
  std::string line;
  if (!std::getline(in, line)) throw DomainError("cusp CSV: missing header");
  std::size_t cols = 0;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty() || line == "\r") continue;
    std::vector<double> vals;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        std::size_t used = 0;
        vals.push_back(std::stod(cell, &used));
      } catch (const std::exception&) {
        throw DomainError("cusp CSV: row " + std::to_string(row) + ": bad number '" + cell + "'");
      }
    }
    if (cols == 0) {
      cols = vals.size();
      if (cols < 3 || cols % 2 == 0) throw DomainError("cusp CSV: need 1 + 2*dim columns");
      d.dim = (cols - 1) / 2;
    }
    if (vals.size() != cols) throw DomainError("cusp CSV: row " + std::to_string(row) + " has wrong column count");
    d.theta.push_back(vals[0]);
    d.v_plus.insert(d.v_plus.end(), vals.begin() + 1, vals.begin() + 1 + static_cast<std::ptrdiff_t>(d.dim));
    d.v_minus.insert(d.v_minus.end(), vals.begin() + 1 + static_cast<std::ptrdiff_t>(d.dim), vals.end());
  }
  d.validate();
  return d;
}

Mode classify_cusp(const CuspProfile& p) {
  return classify_profile_mode(p.profile, std::max(p.quadrature_error, 1e-9));
}

}  // namespace declab
