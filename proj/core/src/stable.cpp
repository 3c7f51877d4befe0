#include "declab/stable.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "declab/errors.hpp"

namespace declab {

namespace {

constexpr double kPi = std::numbers::pi;

void check_alpha(double alpha) {
  if (alpha == 1.0) throw UnsupportedError("alpha = 1 is not supported");
  if (!(alpha > 0.0 && alpha < 2.0)) throw DomainError("alpha must lie in (0,2)");
}

double dot(const Vec& a, const Vec& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double uniform_open(Rng& rng) {
  // (0,1): never returns an endpoint.
  double u;
  do u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  while (u == 0.0);
  return u;
}

}  // namespace

Rng make_stream(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  return Rng(seq);
}

SpectralMeasure::SpectralMeasure(std::vector<SpectralAtom> atoms) : atoms_(std::move(atoms)) {
  if (atoms_.empty()) throw DomainError("SpectralMeasure: no atoms");
  double total = 0.0;
  for (std::size_t i = 0; i < atoms_.size(); ++i) {
    const auto& a = atoms_[i];
    if (a.omega.size() != atoms_[0].omega.size() || a.omega.empty())
      throw DomainError("SpectralMeasure: atom dimension mismatch");
    if (!(a.weight > 0.0)) throw DomainError("SpectralMeasure: weights must be positive");
    if (std::abs(norm(a.omega) - 1.0) > 1e-12) throw DomainError("SpectralMeasure: atoms must be unit vectors");
    for (std::size_t j = 0; j < i; ++j)
      if (atoms_[j].omega == a.omega) throw DomainError("SpectralMeasure: duplicate atom");
    total += a.weight;
  }
  if (std::abs(total - 1.0) > 1e-12)
    throw DomainError("SpectralMeasure: weights sum to " + std::to_string(total) + ", expected 1");
}

SpectralMeasure SpectralMeasure::symmetric() { return SpectralMeasure({{{1.0}, 0.5}, {{-1.0}, 0.5}}); }

Vec SpectralMeasure::mean() const {
  Vec m(dim(), 0.0);
  for (const auto& a : atoms_)
    for (std::size_t i = 0; i < m.size(); ++i) m[i] += a.weight * a.omega[i];
  return m;
}

std::size_t SpectralMeasure::sample_atom(Rng& rng) const {
  if (atoms_.size() == 1) return 0;
  double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  for (std::size_t i = 0; i + 1 < atoms_.size(); ++i) {
    if (u < atoms_[i].weight) return i;
    u -= atoms_[i].weight;
  }
  return atoms_.size() - 1;
}

std::complex<double> char_fn(double alpha, const SpectralMeasure& nu, const Vec& s) {
  check_alpha(alpha);
  if (s.size() != nu.dim()) throw DomainError("char_fn: dimension mismatch");
  const double c = std::cos(kPi * alpha / 2.0) * std::tgamma(1.0 - alpha);
  const double tn = std::tan(kPi * alpha / 2.0);
  std::complex<double> exponent = 0.0;
  for (const auto& a : nu.atoms()) {
    double x = dot(s, a.omega);
    if (x == 0.0) continue;
    double sgn = x > 0.0 ? 1.0 : -1.0;
    exponent -= a.weight * std::pow(std::abs(x), alpha) * std::complex<double>(1.0, -sgn * tn) * c;
  }
  return std::exp(exponent);
}

double atom_scale(double alpha, double weight) {
  check_alpha(alpha);
  return std::pow(weight * std::cos(kPi * alpha / 2.0) * std::tgamma(1.0 - alpha), 1.0 / alpha);
}

double sample_skewed_stable(double alpha, double sigma, Rng& rng) {
  check_alpha(alpha);
  const double tn = std::tan(kPi * alpha / 2.0);
  const double b = std::atan(tn) / alpha;
  const double s = std::pow(1.0 + tn * tn, 1.0 / (2.0 * alpha));
  const double v = kPi * (uniform_open(rng) - 0.5);
  const double w = -std::log(uniform_open(rng));
  const double x = s * std::sin(alpha * (v + b)) / std::pow(std::cos(v), 1.0 / alpha) *
                   std::pow(std::cos(v - alpha * (v + b)) / w, (1.0 - alpha) / alpha);
  return sigma * x;
}

Vec sample_marginal(double alpha, const SpectralMeasure& nu, Rng& rng) {
  check_alpha(alpha);
  Vec g(nu.dim(), 0.0);
  for (const auto& a : nu.atoms()) {
    double y = sample_skewed_stable(alpha, atom_scale(alpha, a.weight), rng);
    for (std::size_t i = 0; i < g.size(); ++i) g[i] += y * a.omega[i];
  }
  return g;
}

LevyPath sample_path(double alpha, const SpectralMeasure& nu, std::size_t K, std::size_t m, Rng& rng) {
  check_alpha(alpha);
  if (K == 0) throw DomainError("sample_path: K must be positive");
  if (m == 0) throw DomainError("sample_path: grid must be positive");
  const std::size_t d = nu.dim();
  const double eps = std::pow(static_cast<double>(K), -1.0 / alpha);
  const double md = static_cast<double>(m);

  auto on_grid = [md](double t) { return std::nearbyint(t * md) / md == t; };
  const auto count = std::poisson_distribution<long long>(static_cast<double>(K))(rng);
  std::vector<LevyJump> jumps(static_cast<std::size_t>(count));
  for (auto& j : jumps) {
    do j.t = uniform_open(rng);
    while (on_grid(j.t));
    j.size = eps * std::pow(uniform_open(rng), -1.0 / alpha);
    j.dir = nu.sample_atom(rng);
  }
  std::sort(jumps.begin(), jumps.end(), [](const LevyJump& a, const LevyJump& b) { return a.t < b.t; });
  for (std::size_t k = 1; k < jumps.size(); ++k)
    if (jumps[k].t <= jumps[k - 1].t) jumps[k].t = std::nextafter(jumps[k - 1].t, 1.0);

  // Small-jump part per unit time.
  const Vec mean = nu.mean();
  const double tail_var = alpha / (2.0 - alpha) * std::pow(eps, 2.0 - alpha);
  const double drift_coef = alpha < 1.0 ? alpha / (1.0 - alpha) * std::pow(eps, 1.0 - alpha)
                                        : -alpha / (alpha - 1.0) * std::pow(eps, 1.0 - alpha);
  std::vector<double> grid_times(m), increments(m * d);
  std::normal_distribution<double> normal;
  for (std::size_t j = 0; j < m; ++j) {
    grid_times[j] = j + 1 == m ? 1.0 : static_cast<double>(j + 1) / md;
    for (std::size_t i = 0; i < d; ++i) increments[j * d + i] = drift_coef * mean[i] / md;
    if (alpha > 1.0) {
      for (const auto& a : nu.atoms()) {
        double z = normal(rng) * std::sqrt(a.weight * tail_var / md);
        for (std::size_t i = 0; i < d; ++i) increments[j * d + i] += z * a.omega[i];
      }
    }
  }

  std::vector<double> cont(d, 0.0);
  for (std::size_t j = 0; j < m; ++j)
    for (std::size_t i = 0; i < d; ++i) cont.push_back(cont[j * d + i] + increments[j * d + i]);

  std::vector<double> times, flat(d, 0.0);
  times.reserve(jumps.size() + m);
  flat.reserve((jumps.size() + m + 1) * d);
  std::size_t a = 0, g = 0;
  while (a < jumps.size() || g < m) {
    const std::size_t base = flat.size() - d;
    if (g == m || (a < jumps.size() && jumps[a].t < grid_times[g])) {
      const Vec& w = nu[jumps[a].dir].omega;
      times.push_back(jumps[a].t);
      for (std::size_t i = 0; i < d; ++i) flat.push_back(flat[base + i] + jumps[a].size * w[i]);
      ++a;
    } else {
      times.push_back(grid_times[g]);
      for (std::size_t i = 0; i < d; ++i) flat.push_back(flat[base + i] + increments[g * d + i]);
      ++g;
    }
  }

  return LevyPath{alpha,
                  nu,
                  eps,
                  std::move(jumps),
                  m,
                  StepPath(d, grid_times, std::move(cont)),
                  StepPath(d, std::move(times), std::move(flat)),
                  tail_var};
}

HillResult hill_estimator(std::vector<double> samples, std::size_t k) {
  if (k == 0 || k >= samples.size()) throw DomainError("hill_estimator: need 0 < k < sample count");
  for (double x : samples)
    if (!(x > 0.0)) throw DomainError("hill_estimator: samples must be positive");
  std::nth_element(samples.begin(), samples.begin() + static_cast<std::ptrdiff_t>(k), samples.end(),
                   std::greater<>());
  const double threshold = samples[k];
  double h = 0.0;
  for (std::size_t i = 0; i < k; ++i) h += std::log(samples[i] / threshold);
  h /= static_cast<double>(k);
  if (h == 0.0) return {0.0, true};
  return {1.0 / h, false};
}

double kolmogorov_q(double lambda) {
  if (lambda < 1e-3) return 1.0;
  double sum = 0.0;
  for (int j = 1; j <= 200; ++j) {
    double term = std::exp(-2.0 * j * j * lambda * lambda);
    sum += (j % 2 ? 1.0 : -1.0) * term;
    if (term < 1e-17) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

KsResult ks_two_sample(std::vector<double> xs, std::vector<double> ys) {
  if (xs.empty() || ys.empty()) throw DomainError("ks_two_sample: empty sample");
  std::sort(xs.begin(), xs.end());
  std::sort(ys.begin(), ys.end());
  const double n = static_cast<double>(xs.size()), m = static_cast<double>(ys.size());
  std::size_t i = 0, j = 0;
  double dmax = 0.0;
  while (i < xs.size() && j < ys.size()) {
    double v = std::min(xs[i], ys[j]);
    while (i < xs.size() && xs[i] == v) ++i;
    while (j < ys.size() && ys[j] == v) ++j;
    dmax = std::max(dmax, std::abs(static_cast<double>(i) / n - static_cast<double>(j) / m));
  }
  const double ne = std::sqrt(n * m / (n + m));
  return {dmax, kolmogorov_q((ne + 0.12 + 0.11 / ne) * dmax)};
}

}  // namespace declab
