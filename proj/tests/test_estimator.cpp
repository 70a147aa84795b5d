#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "sepvol/estimator.hpp"

using namespace sepvol;
using std::numbers::pi;

namespace {

constexpr auto R = Field::Real;
constexpr auto C = Field::Complex;
constexpr auto H = Field::Quaternion;

ScenarioSpec qq(std::vector<Pair> p) { return make_scenario(kQubitQubit, std::move(p)); }

McConfig mc(std::uint64_t n, std::uint64_t seed = 20080101, int shards = 8) {
  McConfig c;
  c.samples = n;
  c.seed = seed;
  c.shards = shards;
  return c;
}

::testing::AssertionResult within(const Estimate& e, double exact, double floor = 0) {
  const double tol = std::max(3 * e.std_error, floor);
  if (std::abs(e.value - exact) <= tol) return ::testing::AssertionSuccess();
  return ::testing::AssertionFailure() << e.value << " ± " << e.std_error << " vs " << exact;
}

}  // namespace

TEST(EstimateC, Examples) {
  const auto cfg = mc(400'000);
  EXPECT_TRUE(within(estimate_c(qq({{2, 3, R}}), cfg), 2));
  EXPECT_TRUE(within(estimate_c(qq({{2, 3, C}}), cfg), pi));
  EXPECT_TRUE(within(estimate_c(qq({{2, 3, H}}), cfg), pi * pi / 2));
  EXPECT_TRUE(within(estimate_c(qq({{1, 4, R}, {2, 3, R}}), cfg), 4));
}

TEST(EstimateC, FieldsAndPreconditions) {
  const auto e = estimate_c(qq({{2, 3, R}}), mc(5000, 17, 3));
  EXPECT_EQ(e.samples, 5000u);
  EXPECT_EQ(e.seed, 17u);
  EXPECT_EQ(e.shards, 3);
  EXPECT_GE(e.std_error, 0);
  EXPECT_LE(e.accepted, e.samples);
  EXPECT_THROW(estimate_c(qq({{2, 3, R}}), mc(999)), Error);
  EXPECT_THROW(estimate_volumes(qq({{2, 3, R}}), mc(9999)), Error);
}

TEST(EstimateS, Examples) {
  const auto cfg = mc(400'000);
  EXPECT_TRUE(within(estimate_S(qq({{2, 3, R}}), {kQubitQubit, {0.25}}, cfg), 1.0));
  EXPECT_TRUE(within(estimate_S(qq({{1, 4, R}}), {kQubitQubit, {4.0}}, cfg), 1.0));
  EXPECT_TRUE(within(estimate_S(qq({{1, 4, R}, {2, 3, R}}), {kQubitQubit, {1.0}}, cfg), 4.0));
  EXPECT_THROW(estimate_S(qq({{2, 3, R}}), {kQubitQutrit, {1.0, 1.0}}, cfg), Error);
}

TEST(SweepS, NinePointGrid) {
  std::vector<RatioCoords> g;
  for (double nu : nine_point_grid()) g.push_back({kQubitQubit, {nu}});
  const auto t = sweep_S(qq({{2, 3, R}}), g, mc(200'000), [](const RatioCoords& nu) {
    return std::optional<double>(2 * std::min(std::sqrt(nu.values[0]), 1.0));
  });
  ASSERT_EQ(t.estimates.size(), g.size());
  ASSERT_EQ(t.closed.size(), g.size());
  for (std::size_t k = 0; k < g.size(); ++k) {
    EXPECT_TRUE(within(t.estimates[k], *t.closed[k])) << g[k].values[0];
    if (k) {
      EXPECT_NE(t.estimates[k].seed, t.estimates[k - 1].seed);
    }
  }
}

TEST(SweepS, QubitQutritFirstRatio) {
  std::vector<RatioCoords> g;
  for (double nu : nine_point_grid()) g.push_back({kQubitQutrit, {nu, 1.0}});
  const auto t = sweep_S(make_scenario(kQubitQutrit, {{1, 5, R}}), g, mc(200'000));
  for (std::size_t k = 0; k < g.size(); ++k)
    EXPECT_TRUE(within(t.estimates[k], 2 * std::min(1.0, 1 / std::sqrt(g[k].values[0])))) << g[k].values[0];
}

TEST(SweepS, TrivialScenarioIsConstant) {
  std::vector<RatioCoords> g;
  for (double nu : nine_point_grid()) g.push_back({kQubitQubit, {nu}});
  const auto t = sweep_S(qq({{1, 2, R}, {3, 4, R}}), g, mc(20'000));
  const double c = estimate_c(qq({{1, 2, R}, {3, 4, R}}), mc(20'000)).value;
  for (const auto& e : t.estimates) EXPECT_NEAR(e.value, 4, 0.1);
  EXPECT_NEAR(c, 4, 0.1);
}

TEST(SweepS, GridValidation) {
  EXPECT_THROW(sweep_S(qq({{2, 3, R}}), {}, mc(2000)), Error);
  EXPECT_THROW(sweep_S(qq({{2, 3, R}}), {{kQubitQubit, {2.0}}, {kQubitQubit, {1.0}}}, mc(2000)), Error);
  EXPECT_THROW(sweep_S(qq({{2, 3, R}}), {{kQubitQubit, {1.0}}, {kQubitQubit, {1.0}}}, mc(2000)), Error);
}

TEST(EstimateVolumes, Examples) {
  const auto a = estimate_volumes(qq({{2, 3, R}}), mc(4'000'000));
  EXPECT_TRUE(within(a.v_tot, pi / 48));
  EXPECT_TRUE(within(a.v_sep, pi * pi / 256));
  EXPECT_TRUE(within(a.p, 3 * pi / 16, 0.01));
  EXPECT_TRUE(within(a.p, 3 * pi / 16));

  const auto b = estimate_volumes(qq({{1, 4, H}}), mc(4'000'000));
  EXPECT_TRUE(within(b.v_tot, pi * pi / 2520));
  EXPECT_TRUE(within(b.v_sep, pi * pi / 25200));
  EXPECT_TRUE(within(b.p, 0.1));

  const auto c = estimate_volumes(make_scenario(kQutritQutrit, {{6, 8, C}}), mc(1'000'000));
  EXPECT_TRUE(within(c.p, 1.0 / 3, 0.01));
}

TEST(EstimateVolumes, NoEntanglingPairMeansEverythingSeparable) {
  for (const auto& s : {qq({{1, 2, R}, {1, 3, R}, {2, 4, R}, {3, 4, R}}), qq({{1, 2, C}, {3, 4, H}}),
                        qq({{1, 3, R}, {2, 4, C}})}) {
    const auto v = estimate_volumes(s, mc(100'000));
    EXPECT_EQ(v.v_sep.value, v.v_tot.value);
    EXPECT_EQ(v.p.value, 1.0);
  }
}

TEST(EstimateVolumes, RatioEstimatorIsCoupled) {
  const auto v = estimate_volumes(qq({{1, 4, R}, {2, 3, R}}), mc(400'000));
  EXPECT_DOUBLE_EQ(v.p.value, v.v_sep.value / v.v_tot.value);
  // the delta-method error is smaller than the naive independent combination
  const double naive = v.p.value * std::hypot(v.v_sep.std_error / v.v_sep.value, v.v_tot.std_error / v.v_tot.value);
  EXPECT_LT(v.p.std_error, naive);
  EXPECT_GT(v.p.std_error, 0);
}

TEST(EstimateVolumes, UntilDoublesSamples) {
  McConfig cfg = mc(20'000);
  const auto v = estimate_volumes_until(qq({{2, 3, R}}), cfg, 0.004);
  EXPECT_LE(v.p.std_error, 0.004);
  EXPECT_GT(v.p.samples, 20'000u);
  EXPECT_EQ(v.p.samples % 20'000, 0u);
  const auto capped = estimate_volumes_until(qq({{2, 3, R}}), cfg, 1e-9, 80'000);
  EXPECT_EQ(capped.p.samples, 80'000u);
}

TEST(Determinism, IndependentOfShardsAndWorkers) {
  const auto s = qq({{1, 2, C}, {1, 4, R}, {2, 3, R}});
  McConfig base = mc(50'000, 424242, 1);
  base.workers = 1;
  const auto ref = estimate_volumes(s, base);
  const auto cref = estimate_c(s, base);
  const auto sref = estimate_S(s, {kQubitQubit, {0.7}}, base);
  for (int shards : {1, 2, 3, 7, 16})
    for (int workers : {1, 2, 5}) {
      McConfig c = base;
      c.shards = shards;
      c.workers = workers;
      const auto v = estimate_volumes(s, c);
      EXPECT_EQ(v.v_tot.value, ref.v_tot.value);
      EXPECT_EQ(v.v_sep.value, ref.v_sep.value);
      EXPECT_EQ(v.p.std_error, ref.p.std_error);
      EXPECT_EQ(estimate_c(s, c).value, cref.value);
      EXPECT_EQ(estimate_S(s, {kQubitQubit, {0.7}}, c).value, sref.value);
    }
  McConfig other = base;
  other.seed = 424243;
  EXPECT_NE(estimate_volumes(s, other).v_tot.value, ref.v_tot.value);
}

TEST(Duality, DualPairsOnNinePointGrid) {
  const std::pair<ScenarioSpec, ScenarioSpec> pairs[] = {
      {qq({{1, 4, R}}), qq({{2, 3, R}})},
      {qq({{1, 2, R}, {1, 4, R}}), qq({{1, 2, R}, {2, 3, R}})},
      {qq({{1, 4, C}, {3, 4, R}}), qq({{2, 3, C}, {3, 4, R}})},
  };
  const auto& g = nine_point_grid();
  for (const auto& [a, b] : pairs)
    for (std::size_t k = 0; k < g.size(); ++k) {
      const auto ea = estimate_S(a, {kQubitQubit, {g[k]}}, mc(100'000, derive_seed(1, k)));
      const auto eb = estimate_S(b, {kQubitQubit, {1 / g[k]}}, mc(100'000, derive_seed(2, k)));
      const double sigma = std::hypot(ea.std_error, eb.std_error);
      EXPECT_LE(std::abs(ea.value - eb.value), 3 * sigma + 1e-12) << g[k];
    }
}

TEST(Monotonicity, IsotonicDeviationWithinThreeSigma) {
  for (const auto& s : {qq({{2, 3, R}}), qq({{1, 4, C}}), qq({{1, 2, R}, {1, 4, R}, {2, 3, R}})}) {
    const auto& g = nine_point_grid();
    std::vector<Estimate> e;
    for (std::size_t k = 0; k < g.size(); ++k) e.push_back(estimate_S(s, {kQubitQubit, {g[k]}}, mc(100'000, derive_seed(3, k))));
    const double c = estimate_c(s, mc(100'000)).value;
    for (std::size_t k = 0; k < g.size(); ++k) {
      EXPECT_GE(e[k].value, 0);
      EXPECT_LE(e[k].value, c + 3 * e[k].std_error + 0.05);
      if (k == 0) continue;
      const double sigma = std::hypot(e[k].std_error, e[k - 1].std_error);
      if (g[k] <= 1) {
        EXPECT_GE(e[k].value, e[k - 1].value - 3 * sigma) << g[k];
      } else {
        EXPECT_LE(e[k].value, e[k - 1].value + 3 * sigma) << g[k];
      }
    }
  }
}
