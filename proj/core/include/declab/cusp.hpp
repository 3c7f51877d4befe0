#pragma once

// Flat-cusp profiles from boundary observable traces.

#include <istream>
#include <vector>

#include "declab/metrics.hpp"
#include "declab/paths.hpp"

namespace declab {

struct CuspData {
  double alpha = 1.5;          // beta / (beta - 1)
  std::size_t dim = 1;
  std::vector<double> theta;   // common grid covering [0, pi], increasing
  std::vector<double> v_plus;  // theta.size() * dim, row-major
  std::vector<double> v_minus;

  static double alpha_from_beta(double beta);
  void validate() const;
};

struct CuspProfile {
  Profile profile;
  double terminal_norm = 0.0;     // |P(1)| before normalisation
  double quadrature_error = 0.0;  // estimate for the normalised profile (sup norm)
};

// P(t) = 1/2 int_0^{t pi} {v_+(theta) + v_-(pi - theta)} (sin theta)^{1/alpha} dtheta,
// cumulative composite trapezoid on m cells with traces interpolated linearly,
// normalised to |P(1)| = 1. DegenerateProfileError if |P(1)| < 1e-8.
CuspProfile cusp_profile(const CuspData& data, std::size_t m = 2048);

// CSV with a header row and columns theta, v_plus (dim columns), v_minus (dim
// columns); dim is inferred from the column count.
CuspData read_cusp_csv(std::istream& in, double alpha);

// Classifier tolerance max(quadrature_error, 1e-9).
Mode classify_cusp(const CuspProfile& p);

}  // namespace declab
