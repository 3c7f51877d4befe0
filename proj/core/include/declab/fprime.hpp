#pragma once

// Excursion triples (u, S, {e^tau}), their projections, the pseudometric and
// the constructions that attach excursions to jump paths.

#include <vector>

#include "declab/metrics.hpp"
#include "declab/paths.hpp"
#include "declab/stable.hpp"

namespace declab {

// Excursion triple. S is sorted and excursions[k] is attached at S[k].
class Decorated {
 public:
  Decorated(Path u, std::vector<double> S, std::vector<Path> excursions);

  // No excursions: S = Disc_u must be empty.
  static Decorated plain(Path u) { return Decorated(std::move(u), {}, {}); }

  const Path& u() const noexcept { return u_; }
  const std::vector<double>& S() const noexcept { return S_; }
  const std::vector<Path>& excursions() const noexcept { return excursions_; }
  std::size_t dim() const { return declab::dim(u_); }

 private:
  Path u_;
  std::vector<double> S_;
  std::vector<Path> excursions_;
};

struct Box {
  Vec lo;
  Vec hi;
};

struct EElement {
  Path u;
  std::vector<double> S;
  std::vector<Box> boxes;  // boxes[k] is K^{S[k]}
};

// Coordinatewise range of a path (exact for both representations).
Box range_box(const Path& e);

EElement pi_E(const Decorated& x);

// Graph of the set-valued path: u off S, the box K^tau at tau in S.
GraphSet e_graph(const EElement& e);

struct SplicedPath {
  StepPath path;
  double discretization_error = 0.0;  // d_D~ bound from converting polylines
};

// Splices the excursions into inserted intervals of length m^{-2} after the
// m-th time of S (time order) and rescales to [0,1]. Polyline pieces are
// converted with value step `polyline_step`; with polyline_step = 0 they are
// rejected.
SplicedPath pi_D(const Decorated& x, double polyline_step = 0.0);

MetricResult d_E(const Decorated& x, const Decorated& y, double delta);

// d_E + d_D~ of the projections; error bounds add.
MetricResult d_Fprime(const Decorated& x, const Decorated& y, double delta, double polyline_step = 0.0);

// S = Disc_u with e^tau(t) = u(tau-) + |du| Pi(du)(t) + t (du - |du| Pi(du)(1)),
// du = u(tau) - u(tau-).
Decorated chi(const Path& u, const ProfileSet& profiles);

// S = {j/n : 1 <= j <= n}; each excursion switches from w(tau-) to w(tau) at
// t = 1/2.
Decorated embed_step_trivial(const StepPath& w, std::size_t n);

// Listed jumps get L(tau-) + size * P_dir(t); grid increments of the
// continuous part get straight-line excursions.
Decorated decorate_levy(const LevyPath& L, const ProfileSet& profiles);

// Running maximum of the set-valued projection (d = 1, step u only).
StepPath psi_max(const Decorated& x);

}  // namespace declab
