#pragma once

// Inducing schemes: first returns, induced observables, the processes W_n,
// W_n^V, U_n and the excursion functions xi, zeta.

#include <optional>
#include <utility>
#include <vector>

#include "declab/orbit.hpp"
#include "declab/paths.hpp"
#include "declab/stable.hpp"

namespace declab {

struct SchemeOptions {
  std::size_t return_cap = 10'000'000;
  // Birkhoff-average iterations used to centre HolderVector observables.
  std::size_t centering_iterations = 100'000'000;
  std::size_t burn_in = 1000;
};

class InducedScheme {
 public:
  InducedScheme(MapSpec map, ObservableSpec observable, ProfileSet profiles, double alpha,
                SchemeOptions options = {});

  // Standard observable, inducing set and profiles for each map:
  //   doubling   x^{-1/alpha} on X = [1/2,1], alpha in (0,1)
  //   tripling   |x-1/8|^{-1/alpha} - |x-3/8|^{-1/alpha} on X = [0,1] minus [01],[10]
  //   lsv        centred (1-x) on X = [1/2,1]
  //   double-lsv centred ((1-x), x) on X = [1/4,3/4]
  //   gauss      floor(1/x) on X = (0,1)
  static InducedScheme canonical(const MapSpec& map, double alpha, SchemeOptions options = {});

  const MapSpec& map() const noexcept { return map_; }
  const ObservableSpec& observable() const noexcept { return observable_; }
  const ProfileSet& profiles() const noexcept { return profiles_; }
  double alpha() const noexcept { return alpha_; }
  std::size_t dim() const { return observable_dim(observable_); }
  const SchemeOptions& options() const noexcept { return options_; }
  // 2 or 3 for the canonical doubling and tripling schemes, whose profiles
  // are geometric with ratio +-base^{-1/alpha}; 0 otherwise.
  int geometric_base() const noexcept { return geometric_base_; }

  // X as a union of closed intervals.
  std::vector<std::pair<double, double>> X() const;
  bool in_X(const Orbit& o) const;
  bool in_X(double x) const;

  // int_X R dmu_X = 1/mu(X) where known in closed form (doubling 2, tripling
  // 9/7, gauss 1); nullopt otherwise.
  std::optional<double> kac_mean() const;
  // (int_X R dmu_X)^{-1/alpha}: L_alpha = levy_scale * L~_alpha.
  std::optional<double> levy_scale() const;
  std::optional<SpectralMeasure> spectral() const;

  double bn(std::size_t n) const;

  // Initial point distributed as the reference measure on M (Lebesgue, Gauss
  // measure for the Gauss map).
  Orbit sample_mu(Rng& rng) const;
  // Point distributed as mu_X (exact for doubling, tripling and gauss; after a
  // burn-in orbit for the intermittent maps).
  Orbit sample_muX(Rng& rng) const;
  // mu_X conditioned on R >= rmin (doubling and tripling only).
  Orbit sample_muX_tail(std::size_t rmin, Rng& rng) const;

 private:
  MapSpec map_;
  ObservableSpec observable_;
  ProfileSet profiles_;
  double alpha_;
  SchemeOptions options_;
  int geometric_base_ = 0;
};

// Canonical step profiles.
// Doubling: values 1 - c^j at times 1 - 2^{-j}, c = 2^{-1/alpha}, then 1.
Profile doubling_profile(double alpha);
// Tripling: values 1 - (-c)^j at times 1 - 2^{-j}, c = 3^{-1/alpha}, then 1.
Profile tripling_profile(double alpha);

// One excursion from x in X: partial sums v_0 = 0, ..., v_R = V, flattened.
struct ExcursionData {
  double x0 = 0.0;
  std::size_t R = 0;
  std::vector<double> partial;  // (R+1) * dim values
};

// Follows o from a point of X to its first return, filling `out` and leaving
// o at T^R x. NonReturnError past the return cap.
void next_excursion(const InducedScheme& s, Orbit& o, ExcursionData& out);

struct FirstReturn {
  std::size_t R = 0;
  std::vector<double> segment;  // x, Tx, ..., T^R x
};

FirstReturn first_return(const InducedScheme& s, double x);

struct OrbitSample {
  double x0 = 0.0;
  std::size_t R = 0;
  Vec V;
  StepPath xi;    // v_{[tR]}
  StepPath zeta;  // |V| Pi(V)(t) + t (V - |V| Pi(V)(1))
};

OrbitSample induced_observable(const InducedScheme& s, Orbit o);
OrbitSample induced_observable(const InducedScheme& s, double x);

// zeta for the induced value V; polyline profiles are sampled at l/R.
StepPath zeta_path(const InducedScheme& s, const Vec& V, std::size_t R);
StepPath xi_path(const ExcursionData& e, std::size_t dim);

// d_D~(xi, zeta) for one excursion, in double precision.
double excursion_distance(const InducedScheme& s, const ExcursionData& e);

struct ExcursionDistance {
  std::size_t R = 0;
  double distance = 0.0;
  bool extended = false;  // recomputed in 113-bit arithmetic
};

// Follows o through one excursion and returns d_D~(xi, zeta). For canonical
// doubling and tripling schemes on symbolic orbits the value is recomputed in
// 113-bit arithmetic against the untruncated geometric profile whenever the
// double-precision rounding estimate (R+1) max|v_l| 2^-52 exceeds 1e-9; for
// tripling, V grows like 9^R at alpha = 1/2 and double cancellation would
// otherwise dominate the O(R) distance.
ExcursionDistance excursion_distance(const InducedScheme& s, Orbit& o);

// b_n^{-1} max_{0 <= j <= n} d_D~(xi, zeta) o f^j along one induced orbit.
double hypothesis_main_stat(const InducedScheme& s, std::size_t n, Rng& rng);

struct VlResidual {
  double residual = 0.0;
  std::size_t R = 0;
  std::ptrdiff_t branch = -1;  // profile index, -1 for X_0
  double normalized = 0.0;     // residual / R
};

// max_{l <= R} |v_l - lambda_i P_i(l/R) R| with i the profile nearest to V.
VlResidual vl_residual(const InducedScheme& s, Orbit o, const std::vector<double>& lambdas);

struct WnPath {
  StepPath path;                     // jumps at j/n, j = 1..n
  std::vector<std::size_t> returns;  // l in 1..n with T^l x in X
};

WnPath wn_path(const InducedScheme& s, Orbit o, std::size_t n);
StepPath wnv_path(const InducedScheme& s, Orbit o, std::size_t n);

struct UnPath {
  StepPath path;                // jumps at t_{n,j} = R_j / n
  std::vector<std::size_t> lap;  // N_0, ..., N_n
  std::vector<double> times;    // t_{n,j}, j = 1..N_n
};

UnPath un_path(const InducedScheme& s, Orbit o, std::size_t n);

// sum_{j<n} v(T^j x) without storing the path.
Vec birkhoff_sum(const InducedScheme& s, Orbit o, std::size_t n);
// N_n = #{1 <= l <= n : T^l x in X}.
std::size_t lap_number(const InducedScheme& s, Orbit o, std::size_t n);

struct InducedSample {
  double x0 = 0.0;
  std::size_t R = 0;
  Vec V;
};

// Independent mu_X draws for doubling/tripling/gauss; consecutive returns of
// one mu_X-distributed orbit for the intermittent maps.
std::vector<InducedSample> induce(const InducedScheme& s, std::size_t count, Rng& rng);

}  // namespace declab
