#pragma once

// Distances on path and graph spaces.

#include <utility>

#include "declab/paths.hpp"

namespace declab {

enum class Method { Exact, Sampled, Bracket };

const char* to_string(Method m);

struct MetricResult {
  double value = 0.0;
  double error_bound = 0.0;  // |value - true distance| <= error_bound
  Method method = Method::Exact;
};

// Hausdorff distance between compact sets. Primitives are refined into cells
// of radius <= delta/2 wherever they can still raise the maximum, and
// distances from cell centers to the other set are exact, so the true distance
// lies in [value, value + delta/2].
MetricResult hausdorff(const GraphSet& a, const GraphSet& b, double delta);

// Infimum over increasing homeomorphisms lambda of sup_t |u1(lambda(t)) - u2(t)|,
// computed as the endpoint-pinned discrete Frechet distance of the two value
// sequences.
MetricResult d_tildeD(const StepPath& u1, const StepPath& u2);

// Discrete Frechet distance between two sequences of points in R^d (flattened),
// with both endpoints pinned.
double discrete_frechet(std::span<const double> a, std::span<const double> b, std::size_t dim);

// Hausdorff distance of the segment-completed graphs.
MetricResult d_M2(const Path& u1, const Path& u2, double delta);

// Bracket (m, 2m) for the strong J1 distance, where m is the minimum over
// monotone jump couplings of max(value mismatch, time displacement).
std::pair<double, double> d_J1_bracket(const StepPath& u1, const StepPath& u2);

// Exact sup_t |u1(t) - u2(t)|.
double sup_distance(const Path& u1, const Path& u2);

enum class Mode { M1, M2, None };

const char* to_string(Mode m);

// Convergence mode implied by a profile: NONE if the profile leaves the
// segment [0, P(1)] (up to tol), M1 if it traverses the segment monotonically,
// M2 otherwise.
Mode classify_profile_mode(const Profile& p, double tol = 1e-9);

}  // namespace declab
