#pragma once

#include "declab/dynamics.hpp"

namespace declab::detail {

// d_D~(xi, zeta) for the excursion starting at o, with partial sums, profile
// values and their differences in 113-bit binary floating point. The profile
// is the untruncated geometric one: values V (1 - r^j) for all j with
// |V r^j| > 1e-12, then V.
double extended_excursion_distance(const InducedScheme& s, Orbit o);

}  // namespace declab::detail
