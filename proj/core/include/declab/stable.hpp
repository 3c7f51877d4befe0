#pragma once

// Stable laws with finitely supported spectral measure: characteristic
// function, marginal and path samplers, tail and two-sample diagnostics.

#include <complex>
#include <cstdint>
#include <random>
#include <vector>

#include "declab/paths.hpp"

namespace declab {

using Rng = std::mt19937_64;

// Independent generator for (seed, stream).
Rng make_stream(std::uint64_t seed, std::uint64_t stream = 0);

struct SpectralAtom {
  Vec omega;
  double weight = 0.0;
};

// nu = sum_i a_i delta_{omega_i} on the unit sphere, total mass 1.
class SpectralMeasure {
 public:
  explicit SpectralMeasure(std::vector<SpectralAtom> atoms);

  static SpectralMeasure point(const Vec& omega) { return SpectralMeasure({{omega, 1.0}}); }
  // (delta_1 + delta_{-1}) / 2 in d = 1.
  static SpectralMeasure symmetric();

  std::size_t dim() const noexcept { return atoms_.front().omega.size(); }
  std::size_t size() const noexcept { return atoms_.size(); }
  const SpectralAtom& operator[](std::size_t i) const { return atoms_[i]; }
  const std::vector<SpectralAtom>& atoms() const noexcept { return atoms_; }

  // sum_i a_i omega_i
  Vec mean() const;
  std::size_t sample_atom(Rng& rng) const;

 private:
  std::vector<SpectralAtom> atoms_;
};

// E exp(i s.G) = exp{-sum_i a_i |s.omega_i|^alpha (1 - i sgn(s.omega_i) tan(pi alpha/2))
//                    cos(pi alpha/2) Gamma(1-alpha)}.
std::complex<double> char_fn(double alpha, const SpectralMeasure& nu, const Vec& s);

// Scale sigma_i with sigma_i^alpha = a_i cos(pi alpha/2) Gamma(1-alpha).
double atom_scale(double alpha, double weight);

// Totally skewed S_alpha(sigma, beta=1, mu=0) by the Chambers-Mallows-Stuck
// transformation.
double sample_skewed_stable(double alpha, double sigma, Rng& rng);

// One draw of G_alpha: sum_i omega_i Y_i with independent skewed Y_i.
Vec sample_marginal(double alpha, const SpectralMeasure& nu, Rng& rng);

struct LevyJump {
  double t = 0.0;
  double size = 0.0;
  std::size_t dir = 0;  // atom index; the jump is size * omega_dir
};

struct LevyPath {
  double alpha = 0.0;
  SpectralMeasure nu;
  double threshold = 0.0;    // jumps of size > threshold are listed
  std::vector<LevyJump> jumps;
  std::size_t grid = 1;
  StepPath continuous;       // drift / compensator / small-jump part, values at j/grid
  StepPath realized;         // listed jumps plus grid increments
  double tail_variance = 0.0;  // variance per unit time of the small jumps (per unit direction)
};

// Series representation: Poisson(K) jumps above eps = K^{-1/alpha} with
// uniform times, Pareto sizes and nu-distributed directions; below the
// threshold, the mean (alpha < 1) or compensator plus Gaussian fluctuation
// (alpha > 1) on a grid of m cells.
LevyPath sample_path(double alpha, const SpectralMeasure& nu, std::size_t K, std::size_t m, Rng& rng);

struct HillResult {
  double alpha = 0.0;
  bool degenerate = false;  // all top order statistics equal
};

HillResult hill_estimator(std::vector<double> samples, std::size_t k);

struct KsResult {
  double statistic = 0.0;
  double p_value = 1.0;
};

KsResult ks_two_sample(std::vector<double> xs, std::vector<double> ys);

// Asymptotic Kolmogorov tail Q(lambda) = 2 sum (-1)^{j-1} exp(-2 j^2 lambda^2).
double kolmogorov_q(double lambda);

}  // namespace declab
