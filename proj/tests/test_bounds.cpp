#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "sepvol/bounds.hpp"

using namespace sepvol;
using std::numbers::pi;

namespace {

McConfig mc(std::uint64_t n, std::uint64_t seed = 20080101) {
  McConfig c;
  c.samples = n;
  c.seed = seed;
  c.shards = 8;
  return c;
}

bool within(const Estimate& e, double exact, double floor = 0) {
  return std::abs(e.value - exact) <= std::max(3 * e.std_error, floor);
}

}  // namespace

TEST(ApproxS, ClosedForms) {
  EXPECT_NEAR(approx_S(Relaxation::Minor14, 0.5), 512 * pi * pi / 27, 1e-12);
  EXPECT_NEAR(approx_S(Relaxation::Minor14, 0.5), 187.157, 1e-3);
  EXPECT_NEAR(approx_S(Relaxation::Minor23, 0.5), 256.0 / 27 * pi * pi * 2.5 * std::sqrt(0.5), 1e-12);
  EXPECT_NEAR(approx_S(Relaxation::Minor14, 4.0), 256 * 11 * pi * pi / (27 * 8), 1e-12);
  EXPECT_NEAR(approx_S(Relaxation::Minor14, 1.0), approx_S(Relaxation::Minor14, 1 + 1e-12), 1e-9);
  EXPECT_NEAR(approx_S(Relaxation::Minor23, 1.0), approx_S(Relaxation::Minor23, 1 - 1e-12), 1e-9);
}

TEST(ApproxS, Duality) {
  for (double nu : {0.05, 0.2, 0.5, 0.9, 1.0, 1.3, 2.0, 7.0})
    EXPECT_NEAR(approx_S(Relaxation::Minor14, nu), approx_S(Relaxation::Minor23, 1 / nu), 1e-12 * 200) << nu;
}

TEST(ApproxS, Errors) {
  EXPECT_THROW(approx_S(Relaxation::Minor14Plus3x3, 0.5), Error);
  try {
    approx_S(Relaxation::Minor14Plus3x3, 0.5);
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::UnsupportedRelaxation);
  }
  EXPECT_THROW(approx_S(Relaxation::Minor14, 0.0), Error);
  EXPECT_THROW(parse_relaxation("minor99"), Error);
  EXPECT_EQ(parse_relaxation(relaxation_name(Relaxation::Minor14Plus3x3)), Relaxation::Minor14Plus3x3);
}

TEST(ApproxS, RelaxedPredicateContainsPpt) {
  const auto spec = full_real_qq();
  const PositivityKernel pos(spec);
  const PptKernel ppt(spec);
  int checked = 0;
  for (std::uint64_t i = 0; checked < 20000; ++i) {
    DrawRng rng(7, 9, i);
    double z[6];
    sample_z(rng, 6, z);
    if (!pos(z)) continue;
    const double nu = std::exp(rng.uniform(-3, 3));
    const auto d = canonical_diag(RatioCoords{kQubitQubit, {nu}});
    if (!ppt(z, d.data())) continue;
    ++checked;
    for (auto r : {Relaxation::Minor14, Relaxation::Minor23, Relaxation::Minor14Plus3x3})
      ASSERT_TRUE(relaxed_predicate(r, z, nu)) << relaxation_name(r) << " nu " << nu;
  }
}

TEST(ApproxS, SamplingMatchesClosedFormOnNinePointGrid) {
  const auto& grid = nine_point_grid();
  for (std::size_t k = 0; k < grid.size(); ++k)
    for (auto r : {Relaxation::Minor14, Relaxation::Minor23}) {
      const auto e = estimate_approx_S(r, grid[k], mc(1'000'000, derive_seed(31, k)));
      EXPECT_TRUE(within(e, approx_S(r, grid[k]))) << relaxation_name(r) << " nu " << grid[k] << ": " << e.value
                                                   << " ± " << e.std_error;
    }
}

TEST(QuasiS, Values) {
  EXPECT_NEAR(quasi_s(1.0), 5 * std::pow(pi, 4) / 3, 1e-10);
  EXPECT_NEAR(quasi_s(1.0), 162.30, 0.05);
  // series oracle: 52 pi^3/9 - 2 pi^3 mu^2/5 + O(mu^4)
  for (double mu : {1e-2, 3e-3, 1.2e-3}) {
    const double series = std::pow(pi, 3) * (52.0 / 9 - 0.4 * mu * mu);
    EXPECT_NEAR(quasi_s(mu), series, 50 * std::pow(mu, 4));
  }
  EXPECT_NEAR(quasi_s(0.999e-3), quasi_s(1.001e-3), 1e-6);
  EXPECT_THROW(quasi_s(0.0), Error);
  EXPECT_THROW(quasi_s(-1.0), Error);
}

TEST(QuasiS, MonotoneDecreasing) {
  double prev = quasi_s(0.1);
  for (int k = 2; k <= 10; ++k) {
    const double v = quasi_s(0.1 * k);
    EXPECT_LT(v, prev) << k;
    prev = v;
  }
  EXPECT_LT(quasi_s(1.0), approx_S(Relaxation::Minor14, 1.0));
}

TEST(Bounds, ClosedValues) {
  EXPECT_NEAR(bound_probability(BoundKind::UpperSingleMinor), 0.5 + 512 / (135 * pi * pi), 1e-9);
  EXPECT_NEAR(bound_probability(BoundKind::UpperSingleMinor), 0.88427, 1e-5);
  EXPECT_NEAR(bound_probability(BoundKind::LowerPieced), 1024 / (135 * pi * pi), 1e-9);
  EXPECT_NEAR(bound_probability(BoundKind::LowerPieced), 0.76854, 1e-5);
  // independent route: the pieced value is twice the excess of the single-minor bound
  EXPECT_NEAR(bound_probability(BoundKind::LowerPieced), 2 * (bound_probability(BoundKind::UpperSingleMinor) - 0.5),
              1e-9);
}

TEST(Bounds, UpperWith3x3ByQuadrature) {
  const double p = bound_probability(BoundKind::UpperWith3x3);
  EXPECT_NEAR(p, 128.0 / 165, 1e-8);
  EXPECT_NEAR(bound_numerator_3x3(), p * std::pow(pi, 4) / 60480, 1e-15);
  EXPECT_LT(p, bound_probability(BoundKind::UpperSingleMinor));
}

TEST(Bounds, SamplingAgreesWithQuadrature) {
  const auto cfg = mc(4'000'000, 99);
  const auto a = estimate_relaxed_volumes(Relaxation::Minor14, cfg);
  EXPECT_TRUE(within(a.p, bound_probability(BoundKind::UpperSingleMinor))) << a.p.value << " ± " << a.p.std_error;
  const auto b = estimate_relaxed_volumes(Relaxation::Minor23, cfg);
  EXPECT_TRUE(within(b.p, bound_probability(BoundKind::UpperSingleMinor))) << b.p.value << " ± " << b.p.std_error;
  const auto c = estimate_relaxed_volumes(Relaxation::Minor14Plus3x3, cfg);
  EXPECT_TRUE(within(c.p, bound_probability(BoundKind::UpperWith3x3))) << c.p.value << " ± " << c.p.std_error;
  // sandwich that is actually testable
  const auto full = estimate_volumes(full_real_qq(), mc(2'000'000, 5));
  EXPECT_LT(full.p.value, c.p.value);
  EXPECT_LT(c.p.value, a.p.value);
}

TEST(AlternateCoordinates, SpheroidalAndNestedLimitsAgreeWithBox) {
  const double exact = 32 * pi * pi / 27;
  std::uint64_t bad = 1;
  const auto s = estimate_c_spheroidal(mc(1'000'000), &bad);
  EXPECT_EQ(bad, 0u);
  EXPECT_TRUE(within(s, exact)) << s.value << " ± " << s.std_error;
  const auto c = estimate_c_cad(mc(1'000'000));
  EXPECT_TRUE(within(c, exact)) << c.value << " ± " << c.std_error;
  const auto b = estimate_c(full_real_qq(), mc(1'000'000));
  EXPECT_TRUE(within(b, exact)) << b.value << " ± " << b.std_error;
}
