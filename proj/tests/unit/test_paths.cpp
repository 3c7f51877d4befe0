#include <gtest/gtest.h>

#include <random>

#include "declab/errors.hpp"
#include "declab/paths.hpp"

using namespace declab;

namespace {

StepPath unit_jump() { return StepPath::scalar({0.5}, {0.0, 1.0}); }

}  // namespace

TEST(StepPath, EvaluateIsRightContinuous) {
  const StepPath u = unit_jump();
  EXPECT_EQ(u.evaluate(0.5, Side::Right), Vec{1.0});
  EXPECT_EQ(u.evaluate(0.5, Side::Left), Vec{0.0});
  EXPECT_EQ(u.evaluate(0.0), Vec{0.0});
  EXPECT_EQ(u.evaluate(1.0), Vec{1.0});
}

TEST(StepPath, ConstantInTwoDimensions) {
  const StepPath u = StepPath::constant({1.0, 2.0});
  EXPECT_EQ(u.evaluate(0.7), (Vec{1.0, 2.0}));
  EXPECT_TRUE(u.discontinuities().empty());
}

TEST(StepPath, RejectsBadTimes) {
  EXPECT_THROW(StepPath::scalar({0.0}, {0.0, 1.0}), DomainError);
  EXPECT_THROW(StepPath::scalar({0.6, 0.5}, {0.0, 1.0, 2.0}), DomainError);
  EXPECT_THROW(StepPath::scalar({1.5}, {0.0, 1.0}), DomainError);
  EXPECT_THROW(StepPath::scalar({0.5}, {0.0}), DomainError);
}

TEST(StepPath, TerminalJumpAtOne) {
  const StepPath u = StepPath::scalar({0.5, 1.0}, {0.0, 1.0, 3.0});
  EXPECT_EQ(u.evaluate(1.0), Vec{3.0});
  EXPECT_EQ(u.evaluate(1.0, Side::Left), Vec{1.0});
  EXPECT_EQ(u.discontinuities(), (std::vector<double>{0.5, 1.0}));
}

TEST(StepPath, ZeroSizeBreakpointsAreNotDiscontinuities) {
  const StepPath u = StepPath::scalar({0.25, 0.5}, {0.0, 0.0, 1.0});
  EXPECT_EQ(u.discontinuities(), std::vector<double>{0.5});
}

TEST(StepPath, LeftLimitAtZeroIsAnError) {
  EXPECT_THROW(evaluate(Path(unit_jump()), 0.0, Side::Left), DomainError);
}

TEST(PolylinePath, InterpolatesLinearly) {
  const PolylinePath p(1, {0.0, 0.5, 1.0}, {0.0, 2.0, 1.0});
  EXPECT_DOUBLE_EQ(p.evaluate(0.25)[0], 1.0);
  EXPECT_DOUBLE_EQ(p.evaluate(0.75)[0], 1.5);
  EXPECT_THROW(PolylinePath(1, {0.1, 1.0}, {0.0, 1.0}), DomainError);
}

TEST(CompletedGraph, SingleJumpSegmentMode) {
  const GraphSet g = completed_graph(unit_jump(), Completion::Segment);
  ASSERT_EQ(g.primitives.size(), 3u);
  const auto& h0 = std::get<Segment>(g.primitives[0]);
  EXPECT_EQ(h0.p, (Vec{0.0, 0.0}));
  EXPECT_EQ(h0.q, (Vec{0.5, 0.0}));
  bool vertical = false, top = false;
  for (const auto& prim : g.primitives) {
    const auto& s = std::get<Segment>(prim);
    if (s.p == Vec{0.5, 0.0} && s.q == Vec{0.5, 1.0}) vertical = true;
    if (s.p == Vec{0.5, 1.0} && s.q == Vec{1.0, 1.0}) top = true;
  }
  EXPECT_TRUE(vertical);
  EXPECT_TRUE(top);
}

TEST(CompletedGraph, ConstantIsOneSegment) {
  const GraphSet g = completed_graph(StepPath::constant({2.0}), Completion::Segment);
  ASSERT_EQ(g.primitives.size(), 1u);
  const auto& s = std::get<Segment>(g.primitives[0]);
  EXPECT_EQ(s.p, (Vec{0.0, 2.0}));
  EXPECT_EQ(s.q, (Vec{1.0, 2.0}));
}

TEST(CompletedGraph, BoxModeInTwoDimensions) {
  const StepPath u(2, {0.5}, {0.0, 0.0, 1.0, 1.0});
  const GraphSet g = completed_graph(u, Completion::Box);
  bool found = false;
  for (const auto& prim : g.primitives)
    if (const auto* b = std::get_if<TimeBox>(&prim))
      found = b->t == 0.5 && b->lo == Vec{0.0, 0.0} && b->hi == Vec{1.0, 1.0};
  EXPECT_TRUE(found);
}

TEST(PrimitiveDistance, PointToSegmentAndBox) {
  const Segment s{{0.0, 0.0}, {1.0, 0.0}};
  const Vec p{0.5, 0.3};
  EXPECT_NEAR(distance(p, s), 0.3, 1e-15);
  const Vec q{2.0, 0.0};
  EXPECT_NEAR(distance(q, s), 1.0, 1e-15);
  const TimeBox b{0.5, {0.0}, {1.0}};
  const Vec r{0.8, 2.0};
  EXPECT_NEAR(distance(r, b), std::hypot(0.3, 1.0), 1e-15);
}

TEST(AffineTransform, IdentityAndArithmetic) {
  const Path u = unit_jump();
  EXPECT_EQ(std::get<StepPath>(affine_transform(u, 1.0, {0.0})), unit_jump());
  const Path v = affine_transform(u, 3.0, {2.0});
  EXPECT_EQ(evaluate(v, 1.0), Vec{5.0});
  EXPECT_EQ(evaluate(v, 0.2), Vec{2.0});
}

TEST(AffineTransform, NegationOfProfileIsProfile) {
  const Profile p(StepPath::scalar({0.5, 0.75}, {0.0, 10.0 / 9.0, 1.0}));
  const Profile m(affine_transform(p.path(), -1.0, {0.0}));
  EXPECT_EQ(m.direction(), Vec{-1.0});
  EXPECT_EQ(evaluate(m.path(), 0.6), Vec{-10.0 / 9.0});
}

TEST(AddLinearDrift, PolylineIsExactAndStepEndpointIsExact) {
  const Path p = PolylinePath::segment({0.0}, {1.0});
  const Path q = add_linear_drift(p, {2.0});
  EXPECT_DOUBLE_EQ(evaluate(q, 0.5)[0], 1.5);
  const Path s = add_linear_drift(unit_jump(), {1.0}, 100);
  EXPECT_DOUBLE_EQ(evaluate(s, 1.0)[0], 2.0);
  // Discretisation error at most |drift| / grid.
  for (double t : {0.1, 0.33, 0.5, 0.77, 0.999}) EXPECT_LE(std::abs(evaluate(s, t)[0] - (t >= 0.5) - t), 0.01 + 1e-12);
}

TEST(ToStep, ValueStepsBounded) {
  const PolylinePath p(1, {0.0, 0.5, 1.0}, {0.0, 2.0, 1.0});
  const StepPath s = to_step(p, 0.1);
  for (std::size_t k = 1; k < s.state_count(); ++k) EXPECT_LE(std::abs(s.state(k)[0] - s.state(k - 1)[0]), 0.1 + 1e-12);
  EXPECT_EQ(s.terminal(), Vec{1.0});
}

TEST(SupNorm, BothRepresentations) {
  EXPECT_DOUBLE_EQ(sup_norm(StepPath::scalar({0.3, 0.6}, {0.0, -4.0, 1.0})), 4.0);
  EXPECT_DOUBLE_EQ(sup_norm(PolylinePath(2, {0.0, 0.5, 1.0}, {0.0, 0.0, 3.0, 4.0, 0.0, 1.0})), 5.0);
}

TEST(Profile, Validation) {
  EXPECT_NO_THROW(Profile::linear({1.0}));
  EXPECT_THROW(Profile(Path(StepPath::scalar({0.5}, {0.1, 1.0}))), DomainError);
  EXPECT_THROW(Profile(Path(StepPath::scalar({0.5}, {0.0, 2.0}))), DomainError);
  EXPECT_TRUE(Profile::zero(2).is_zero());
}

TEST(ProfileSet, RejectsDuplicateDirections) {
  EXPECT_THROW(ProfileSet({Profile::linear({1.0}), Profile(StepPath::scalar({0.5}, {0.0, 1.0}))}), DomainError);
}

TEST(Pi, NearestDirection) {
  const ProfileSet s1({Profile::linear({1.0}), Profile::linear({-1.0})});
  EXPECT_EQ(Pi({-3.2}, s1).direction(), Vec{-1.0});
  EXPECT_TRUE(Pi({0.0}, s1).is_zero());
  const ProfileSet s2({Profile::linear({1.0, 0.0}), Profile::linear({0.0, 1.0})});
  EXPECT_EQ(Pi({2.0, 1.0}, s2).direction(), (Vec{1.0, 0.0}));
  // Equidistant: zero profile.
  EXPECT_TRUE(Pi({1.0, 1.0}, s2).is_zero());
  EXPECT_EQ(nearest_index({1.0, 1.0}, s2), -1);
}

// Property: evaluate agrees with a direct replay of the jump list.
TEST(StepPathProperty, EvaluateMatchesReplay) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    const int k = static_cast<int>(rng() % 8);
    std::vector<double> times, values{U(rng)};
    for (int i = 0; i < k; ++i) times.push_back(U(rng));
    std::sort(times.begin(), times.end());
    times.erase(std::unique(times.begin(), times.end()), times.end());
    times.erase(std::remove(times.begin(), times.end(), 0.0), times.end());
    for (std::size_t i = 0; i < times.size(); ++i) values.push_back(U(rng));
    const StepPath u = StepPath::scalar(times, values);
    for (int q = 0; q < 20; ++q) {
      const double t = U(rng);
      std::size_t idx = 0;
      while (idx < times.size() && times[idx] <= t) ++idx;
      EXPECT_EQ(u.evaluate(t)[0], values[idx]);
    }
  }
}
