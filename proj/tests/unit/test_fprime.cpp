#include <gtest/gtest.h>

#include <cmath>

#include "declab/dynamics.hpp"
#include "declab/errors.hpp"
#include "declab/fprime.hpp"
#include "declab/metrics.hpp"

using namespace declab;

namespace {

StepPath unit_jump(double tau = 0.5) { return StepPath::scalar({tau}, {0.0, 1.0}); }

// Overshooting profile of the tripling example at alpha = 1/2.
Profile overshoot_profile() { return tripling_profile(0.5); }

}  // namespace

TEST(Decorated, Invariants) {
  const StepPath u = unit_jump();
  EXPECT_THROW(Decorated::plain(u), DomainError);  // Disc_u not covered by S
  EXPECT_THROW(Decorated(u, {0.5}, {PolylinePath::segment({0.0}, {2.0})}), DomainError);
  EXPECT_NO_THROW(Decorated(u, {0.5}, {PolylinePath::segment({0.0}, {1.0})}));
  // Extra excursion at a continuity point must be constant-endpoint matched.
  EXPECT_NO_THROW(Decorated(u, {0.25, 0.5}, {StepPath::constant({0.0}), PolylinePath::segment({0.0}, {1.0})}));
  EXPECT_THROW(Decorated(u, {0.5, 0.25}, {PolylinePath::segment({0.0}, {1.0}), StepPath::constant({0.0})}), DomainError);
}

TEST(PiE, TrivialExcursionBox) {
  const Decorated x = embed_step_trivial(StepPath::scalar({0.5}, {0.0, 2.0}), 2);
  const EElement e = pi_E(x);
  ASSERT_EQ(e.S.size(), 2u);
  EXPECT_EQ(e.boxes[0].lo, Vec{0.0});
  EXPECT_EQ(e.boxes[0].hi, Vec{2.0});
}

TEST(PiE, OvershootBoxIsTenNinths) {
  const double J = 3.0;
  const ProfileSet ps({overshoot_profile()});
  const Decorated x = chi(StepPath::scalar({0.4}, {1.0, 1.0 + J}), ps);
  const EElement e = pi_E(x);
  ASSERT_EQ(e.boxes.size(), 1u);
  EXPECT_NEAR(e.boxes[0].lo[0], 1.0, 1e-12);
  EXPECT_NEAR(e.boxes[0].hi[0], 1.0 + J * 10.0 / 9.0, 1e-12);
}

TEST(PiE, TwoDimensionalSegmentBox) {
  const StepPath u(2, {0.5}, {0.0, 0.0, 1.0, 1.0});
  const Decorated x(u, {0.5}, {PolylinePath::segment({0.0, 0.0}, {1.0, 1.0})});
  const EElement e = pi_E(x);
  EXPECT_EQ(e.boxes[0].lo, (Vec{0.0, 0.0}));
  EXPECT_EQ(e.boxes[0].hi, (Vec{1.0, 1.0}));
}

TEST(PiD, EmptySIsRescaledIdentity) {
  const StepPath u = StepPath::constant({0.3});
  const SplicedPath p = pi_D(Decorated::plain(u));
  EXPECT_EQ(d_tildeD(p.path, u).value, 0.0);
  EXPECT_EQ(p.discretization_error, 0.0);
}

TEST(PiD, IdenticalDecorationsAtZero) {
  const Decorated x = chi(unit_jump(), ProfileSet({Profile::linear({1.0})}));
  const SplicedPath a = pi_D(x, 1e-3), b = pi_D(x, 1e-3);
  EXPECT_EQ(d_tildeD(a.path, b.path).value, 0.0);
  EXPECT_THROW(pi_D(x), DomainError);  // polyline excursion without a step
}

TEST(PiD, LinearExcursionAgainstStepIsHalf) {
  const Decorated x = chi(unit_jump(), ProfileSet({Profile::linear({1.0})}));
  const SplicedPath p = pi_D(x, 1e-3);
  // Oracle: a ramp 0 -> 1 faces a single jump; the best coupling meets at 1/2.
  EXPECT_NEAR(d_tildeD(p.path, unit_jump()).value, 0.5, 1e-3);
}

TEST(PiD, SameShapeDifferentParametrisation) {
  // Excursion P_1 of the doubling example vs the same values on another clock.
  const Profile P = doubling_profile(0.5);
  const StepPath& ps = std::get<StepPath>(P.path());
  std::vector<double> times;
  for (std::size_t k = 0; k < ps.jump_count(); ++k) times.push_back((k + 1.0) / (ps.jump_count() + 1.0));
  const StepPath other(1, times, std::vector<double>(ps.flat_values().begin(), ps.flat_values().end()));
  const StepPath u = unit_jump();
  const Decorated x(u, {0.5}, {ps}), y(u, {0.5}, {other});
  EXPECT_EQ(d_tildeD(pi_D(x).path, pi_D(y).path).value, 0.0);
}

TEST(DFprime, SelfDistance) {
  const Decorated x = chi(StepPath::scalar({0.3, 0.7}, {0.0, 1.0, -0.5}), ProfileSet({Profile::linear({1.0}), Profile::linear({-1.0})}));
  const MetricResult r = d_Fprime(x, x, 1e-3, 1e-3);
  EXPECT_LE(r.value, 1e-3);
  EXPECT_GT(r.error_bound, 0.0);
}

TEST(DFprime, ReparametrisedExcursionsAreClose) {
  const StepPath u = unit_jump();
  const Decorated x(u, {0.5}, {PolylinePath::segment({0.0}, {1.0})});
  const Decorated y(u, {0.5}, {PolylinePath(1, {0.0, 0.9, 1.0}, {0.0, 0.5, 1.0})});
  const MetricResult r = d_Fprime(x, y, 1e-3, 1e-3);
  EXPECT_LE(r.value, 1e-3 + 1e-12);
}

TEST(DFprime, TrivialEmbeddingVersusLinearChi) {
  // Boxes coincide; the trivial excursion is a jump and the chi excursion a
  // ramp, so the D~ component is 1/2 (see the decisions ledger).
  const StepPath u = unit_jump();
  const Decorated triv = embed_step_trivial(u, 2);
  const Decorated lin = chi(u, ProfileSet({Profile::linear({1.0})}));
  const MetricResult e = d_E(triv, lin, 1e-3);
  EXPECT_LE(e.value, 5e-4);
  const MetricResult f = d_Fprime(triv, lin, 1e-3, 1e-3);
  EXPECT_NEAR(f.value, 0.5, 1e-3 + 5e-4);
}

TEST(Chi, ProfileAttachment) {
  const Profile P = overshoot_profile();
  const Profile M(affine_transform(P.path(), -1.0, {0.0}));
  const ProfileSet ps({P, M});
  const double J = 2.0;
  const Decorated up = chi(StepPath::scalar({0.5}, {1.0, 1.0 + J}), ps);
  const Decorated down = chi(StepPath::scalar({0.5}, {1.0, 1.0 - J}), ps);
  for (double t : {0.0, 0.3, 0.5, 0.76, 0.9}) {
    EXPECT_NEAR(evaluate(up.excursions()[0], t)[0], 1.0 + J * evaluate(P.path(), t)[0], 1e-9);
    EXPECT_NEAR(evaluate(down.excursions()[0], t)[0], 1.0 + J * evaluate(M.path(), t)[0], 1e-9);
  }
  EXPECT_EQ(evaluate(up.excursions()[0], 1.0), Vec{1.0 + J});
}

TEST(Chi, EquidistantDirectionGivesLinearExcursion) {
  const ProfileSet ps({Profile::linear({1.0, 0.0}), Profile::linear({0.0, 1.0})});
  const StepPath u(2, {0.5}, {0.0, 0.0, 1.0, 1.0});
  const Decorated x = chi(u, ps);
  ASSERT_EQ(x.S().size(), 1u);
  const Vec mid = evaluate(x.excursions()[0], 0.5);
  EXPECT_NEAR(mid[0], 0.5, 1e-15);
  EXPECT_NEAR(mid[1], 0.5, 1e-15);
}

TEST(EmbedStepTrivial, Examples) {
  const Decorated c = embed_step_trivial(StepPath::constant({0.7}), 4);
  for (const auto& e : c.excursions()) EXPECT_EQ(sup_norm(e), 0.7);
  const Decorated x = embed_step_trivial(StepPath::scalar({0.5}, {0.0, 1.0}), 4);
  const auto& e = std::get<StepPath>(x.excursions()[1]);
  EXPECT_EQ(e.times()[0], 0.5);
  EXPECT_EQ(e.initial(), Vec{0.0});
  EXPECT_EQ(e.terminal(), Vec{1.0});
  EXPECT_THROW(embed_step_trivial(StepPath::scalar({0.3}, {0.0, 1.0}), 4), DomainError);
}

TEST(EmbedStepTrivial, EGraphEqualsBoxCompletedGraph) {
  const StepPath w = StepPath::scalar({0.25, 0.75}, {0.0, 1.0, -1.0});
  const GraphSet a = e_graph(pi_E(embed_step_trivial(w, 4)));
  const GraphSet b = completed_graph(w, Completion::Box);
  EXPECT_LE(hausdorff(a, b, 1e-3).value, 5e-4);
}

TEST(DecorateLevy, ProfilesBySign) {
  const ProfileSet ps({overshoot_profile(), Profile(affine_transform(overshoot_profile().path(), -1.0, {0.0}))});
  const SpectralMeasure nu = SpectralMeasure::symmetric();
  const StepPath cont = StepPath::constant({0.0});
  const StepPath real = StepPath::scalar({0.3, 0.6}, {0.0, 2.0, 1.0});
  const LevyPath L{0.5, nu, 0.1, {{0.3, 2.0, 0}, {0.6, 1.0, 1}}, 1, cont, real, 0.0};
  const Decorated x = decorate_levy(L, ps);
  ASSERT_EQ(x.S().size(), 2u);
  const EElement e = pi_E(x);
  EXPECT_NEAR(e.boxes[0].hi[0], 2.0 * 10.0 / 9.0, 1e-12);
  EXPECT_NEAR(e.boxes[1].lo[0], 2.0 - 10.0 / 9.0, 1e-12);
}

TEST(DecorateLevy, NoJumpsNoExcursions) {
  const SpectralMeasure nu = SpectralMeasure::point({1.0});
  const StepPath z = StepPath::constant({0.0});
  const LevyPath L{0.5, nu, 1.0, {}, 1, z, z, 0.0};
  EXPECT_TRUE(decorate_levy(L, ProfileSet({Profile::linear({1.0})})).S().empty());
}

TEST(PsiMax, Examples) {
  const StepPath u = StepPath::scalar({0.25, 0.5}, {0.0, 1.0, 3.0});
  const StepPath psi = psi_max(embed_step_trivial(u, 4));
  for (double t : {0.1, 0.3, 0.6, 1.0}) EXPECT_EQ(psi.evaluate(t), u.evaluate(t));

  const double J = 0.9;
  const Decorated x = chi(StepPath::scalar({0.5}, {0.2, 0.2 + J}), ProfileSet({overshoot_profile()}));
  const StepPath p = psi_max(x);
  EXPECT_NEAR(p.evaluate(0.7)[0], 0.2 + J * 10.0 / 9.0, 1e-12);
  EXPECT_EQ(p.evaluate(0.4)[0], 0.2);

  EXPECT_EQ(psi_max(Decorated::plain(StepPath::constant({1.5}))).evaluate(0.9)[0], 1.5);
}
