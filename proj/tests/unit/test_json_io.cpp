#include <gtest/gtest.h>

#include <random>

#include "declab/dynamics.hpp"
#include "declab/errors.hpp"
#include "declab/json_io.hpp"

using namespace declab;

namespace {

// Values with full 53-bit mantissas so that any lossy formatting shows up.
double awkward(std::mt19937_64& rng) {
  return std::ldexp(static_cast<double>(rng() >> 11), -53) * 3.0 - 1.0;
}

}  // namespace

TEST(JsonIo, StepPathRoundTripIsBitExact) {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> times, values;
    for (int k = 0; k < 6; ++k) times.push_back((k + 0.5 + 0.4 * std::ldexp(static_cast<double>(rng() >> 11), -53)) / 7.0);
    for (int k = 0; k < 14; ++k) values.push_back(awkward(rng));
    const StepPath u(2, times, values);
    const Path back = path_from_json(json::parse(to_json(u).dump()));
    EXPECT_EQ(std::get<StepPath>(back), u);
  }
}

TEST(JsonIo, PolylineRoundTrip) {
  const PolylinePath p(1, {0.0, 1.0 / 3.0, 1.0}, {0.1, -2.0 / 7.0, 1e300});
  EXPECT_EQ(std::get<PolylinePath>(path_from_json(json::parse(to_json(p).dump()))), p);
}

TEST(JsonIo, MalformedPathsAreDomainErrors) {
  EXPECT_THROW(path_from_json(json::parse(R"({"dim":1,"u0":[0],"kind":"curve","points":[]})")), DomainError);
  EXPECT_THROW(path_from_json(json::parse(R"({"dim":1,"u0":[0],"kind":"step","points":[{"t":0.5,"v":[1,2]}]})")), DomainError);
  EXPECT_THROW(path_from_json(json::parse(R"({"dim":1,"kind":"step","points":[]})")), DomainError);
  EXPECT_THROW(path_from_json(json::parse(R"([1,2])")), DomainError);
  // Polyline u0 must equal the first breakpoint.
  EXPECT_THROW(path_from_json(json::parse(R"({"dim":1,"u0":[1],"kind":"polyline","points":[{"t":0,"v":[0]},{"t":1,"v":[1]}]})")),
               DomainError);
}

TEST(JsonIo, DecoratedRoundTrip) {
  const Decorated x = chi(StepPath::scalar({0.25, 0.5}, {0.0, 1.0, -0.5}), ProfileSet({tripling_profile(0.5),
      Profile(affine_transform(tripling_profile(0.5).path(), -1.0, {0.0}))}));
  const Decorated y = decorated_from_json(json::parse(to_json(x).dump()));
  EXPECT_EQ(to_json(y), to_json(x));
  EXPECT_EQ(y.S(), x.S());
  EXPECT_EQ(std::get<StepPath>(y.u()), std::get<StepPath>(x.u()));
}

TEST(JsonIo, ProfilesAndSpectralRoundTrip) {
  const ProfileSet ps({doubling_profile(0.75), Profile::linear({-1.0})});
  const ProfileSet back = profiles_from_json(json::parse(to_json(ps).dump()));
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(to_json(back), to_json(ps));
  const SpectralMeasure nu({{{0.6, 0.8}, 1.0 / 3.0}, {{0.0, -1.0}, 2.0 / 3.0}});
  EXPECT_EQ(to_json(spectral_from_json(json::parse(to_json(nu).dump()))), to_json(nu));
  EXPECT_THROW(spectral_from_json(json::parse(R"({"atoms":[{"omega":[1],"weight":0.5}]})")), DomainError);
}

TEST(JsonIo, LevyPathRoundTrip) {
  Rng rng = make_stream(3);
  const LevyPath L = sample_path(1.5, SpectralMeasure::symmetric(), 200, 16, rng);
  const LevyPath back = levy_from_json(json::parse(to_json(L).dump()));
  EXPECT_EQ(to_json(back), to_json(L));
  EXPECT_EQ(back.realized, L.realized);
  EXPECT_EQ(back.jumps.size(), L.jumps.size());
}

TEST(JsonIo, MetricResultFields) {
  const json j = to_json(MetricResult{0.25, 5e-4, Method::Sampled});
  EXPECT_EQ(j.at("value").get<double>(), 0.25);
  EXPECT_EQ(j.at("error_bound").get<double>(), 5e-4);
  EXPECT_TRUE(j.contains("method"));
}
