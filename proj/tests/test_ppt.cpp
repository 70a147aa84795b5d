#include <gtest/gtest.h>

#include <random>

#include "sepvol/ppt.hpp"
#include "support.hpp"

using namespace sepvol;

namespace {

std::vector<double> vec(std::initializer_list<double> v) { return v; }

}  // namespace

TEST(PartialTranspose, SwapsAntiDiagonalPairs) {
  HermitianMatrix m(4, Field::Real);
  for (int k = 0; k < 4; ++k) m(k, k).w = 0.25;
  m.set(0, 3, {0.1, 0, 0, 0});
  m.set(1, 2, {0.05, 0, 0, 0});
  auto pt = partial_transpose(m, kQubitQubit);
  EXPECT_EQ(pt(0, 3).w, 0.05);
  EXPECT_EQ(pt(1, 2).w, 0.1);
}

TEST(PartialTranspose, DiagonalUnchanged) {
  HermitianMatrix m(6, Field::Real);
  for (int k = 0; k < 6; ++k) m(k, k).w = (k + 1) / 21.0;
  auto pt = partial_transpose(m, kQubitQutrit);
  for (int r = 0; r < 6; ++r)
    for (int c = 0; c < 6; ++c) EXPECT_EQ(pt(r, c), m(r, c));
}

TEST(PartialTranspose, QubitQutritBlock) {
  HermitianMatrix m(6, Field::Real);
  for (int k = 0; k < 6; ++k) m(k, k).w = 1.0 / 6;
  m.set(0, 4, {0.07, 0, 0, 0});
  auto pt = partial_transpose(m, kQubitQutrit);
  EXPECT_EQ(pt(1, 3).w, 0.07);
  EXPECT_EQ(pt(0, 4).w, 0.0);
}

TEST(PartialTranspose, ShapeMismatch) {
  HermitianMatrix m(4, Field::Real);
  try {
    partial_transpose(m, kQubitQutrit);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::ShapeMismatch);
  }
}

TEST(PartialTranspose, Involution) {
  std::mt19937_64 g(5);
  for (auto split : tsupport::kSplits)
    for (int rep = 0; rep < 100; ++rep) {
      auto s = tsupport::random_scenario(g, split, 0.6);
      auto m = build_matrix(s, {tsupport::random_diag(g, s.n()), tsupport::random_z(g, s)});
      auto back = partial_transpose(partial_transpose(m, split), split);
      for (int r = 0; r < s.n(); ++r)
        for (int c = 0; c < s.n(); ++c) EXPECT_EQ(back(r, c), m(r, c));
    }
}

TEST(RatioCoords, Examples) {
  EXPECT_DOUBLE_EQ(ratio_coords(vec({0.25, 0.25, 0.25, 0.25}), kQubitQubit).values[0], 1.0);
  EXPECT_NEAR(ratio_coords(vec({0.4, 0.2, 0.2, 0.2}), kQubitQubit).values[0], 2.0, 1e-15);
  auto r6 = ratio_coords(std::vector<double>(6, 1.0 / 6), kQubitQutrit);
  EXPECT_DOUBLE_EQ(r6.values[0], 1.0);
  EXPECT_DOUBLE_EQ(r6.values[1], 1.0);
  try {
    ratio_coords(vec({0.5, 0.0, 0.25, 0.25}), kQubitQubit);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::ZeroDiagonal);
  }
}

TEST(RatioCoords, PrintedDefinitions) {
  std::mt19937_64 g(3);
  auto d9 = tsupport::random_diag(g, 9);
  auto r = ratio_coords(d9, kQutritQutrit);
  EXPECT_NEAR(r.values[0], d9[0] * d9[4] / (d9[1] * d9[3]), 1e-14);
  auto d8 = tsupport::random_diag(g, 8);
  auto b = ratio_coords(d8, kThreeQubitBipartite);
  EXPECT_NEAR(b.values[0], d8[0] * d8[5] / (d8[1] * d8[4]), 1e-14);
  EXPECT_NEAR(b.values[1], d8[1] * d8[6] / (d8[2] * d8[5]), 1e-14);
  EXPECT_NEAR(b.values[2], d8[2] * d8[7] / (d8[3] * d8[6]), 1e-14);
  auto t = ratio_coords(d8, kThreeQubitTripartite);
  EXPECT_NEAR(t.values[0], d8[0] * d8[3] / (d8[1] * d8[2]), 1e-14);
  EXPECT_NEAR(t.values[1], d8[3] * d8[4] / (d8[2] * d8[5]), 1e-14);
  EXPECT_NEAR(t.values[2], d8[4] * d8[7] / (d8[5] * d8[6]), 1e-14);
}

TEST(CanonicalDiag, Examples) {
  auto d = canonical_diag({kQubitQubit, {1.0}});
  for (double x : d) EXPECT_DOUBLE_EQ(x, 0.25);
  auto d2 = canonical_diag({kQubitQubit, {2.0}});
  EXPECT_NEAR(d2[0], 0.4, 1e-15);
  for (int k = 1; k < 4; ++k) EXPECT_NEAR(d2[k], 0.2, 1e-15);
  auto d6 = canonical_diag({kQubitQutrit, {1.0, 4.0}});
  for (int k = 0; k < 5; ++k) EXPECT_NEAR(d6[k], 1.0 / 9, 1e-15);
  EXPECT_NEAR(d6[5], 4.0 / 9, 1e-15);
  try {
    canonical_diag({kQubitQubit, {-1.0}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::NonPositiveRatio);
  }
  try {
    canonical_diag({kQubitQutrit, {1.0}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::ArityMismatch);
  }
}

TEST(CanonicalDiag, RoundTrip) {
  std::mt19937_64 g(17);
  std::lognormal_distribution<double> ln(0, 1.5);
  for (auto split : tsupport::kSplits)
    for (int rep = 0; rep < 200; ++rep) {
      RatioCoords nu{split, {}};
      for (int k = 0; k < split.ratio_count(); ++k) nu.values.push_back(ln(g));
      auto d = canonical_diag(nu);
      double t = 0;
      for (double x : d) t += x;
      EXPECT_NEAR(t, 1.0, 1e-14);
      auto back = ratio_coords(d, split);
      for (int k = 0; k < split.ratio_count(); ++k) EXPECT_NEAR(back.values[k] / nu.values[k], 1.0, 1e-12);
    }
}

TEST(DetPt4x4, Examples) {
  EXPECT_DOUBLE_EQ(det_pt_4x4({0, 0, 0, 0, 0, 0}, 3.0), 3.0);
  EXPECT_DOUBLE_EQ(det_pt_4x4({0, 0, 1, 0, 0, 0}, 2.0), -2.0);
  EXPECT_DOUBLE_EQ(det_pt_4x4({0, 0, 0, 1, 0, 0}, 1.0), 0.0);
}

TEST(PptPredicate, Examples) {
  std::mt19937_64 g(1);
  for (auto split : tsupport::kSplits) {
    auto s = tsupport::random_scenario(g, split);
    EXPECT_TRUE(ppt_predicate(s, std::vector<double>(s.total_components, 0.0),
                              {split, std::vector<double>(split.ratio_count(), 0.3)}));
  }
  auto s14 = make_scenario(kQubitQubit, {{1, 4, Field::Real}});
  EXPECT_FALSE(ppt_predicate(s14, vec({1.0}), {kQubitQubit, {4.0}}));
  auto s23 = make_scenario(kQubitQubit, {{2, 3, Field::Real}});
  EXPECT_FALSE(ppt_predicate(s23, vec({0.9}), {kQubitQubit, {0.25}}));
  EXPECT_TRUE(ppt_predicate(s23, vec({0.4}), {kQubitQubit, {0.25}}));
  try {
    ppt_predicate(s23, vec({0.4}), {kQubitQubit, {0.0}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::NonPositiveRatio);
  }
}

// Real qubit-qubit: the quartic sign agrees with the explicit determinant and
// with the general eigenvalue path.
TEST(Property, FastPathAgreement) {
  std::mt19937_64 g(31);
  std::lognormal_distribution<double> ln(0, 1.2);
  auto full = make_scenario(kQubitQubit, tsupport::all_pairs(4, Field::Real));
  const PptKernel k(full);
  int cases = 0;
  for (int rep = 0; rep < 100000; ++rep) {
    auto z = tsupport::random_z(g, full);
    if (!positivity_z(full, z)) continue;
    const double nu = ln(g);
    auto d = canonical_diag({kQubitQubit, {nu}});
    BloorePoint p{d, z};
    auto pt = partial_transpose(build_matrix(full, p), kQubitQubit);
    Eigen::Matrix4d a;
    for (int r = 0; r < 4; ++r)
      for (int c = 0; c < 4; ++c) a(r, c) = pt(r, c).w / std::sqrt(d[r] * d[c]);
    const double det = a.determinant();
    std::array<double, 6> zz;
    std::copy(z.begin(), z.end(), zz.begin());
    const double q = det_pt_4x4(zz, nu);
    EXPECT_NEAR(q / nu, det, 1e-9);
    const double mev = Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d>(a).eigenvalues()[0];
    if (std::abs(mev) < 1e-6) continue;
    EXPECT_EQ(k(z.data(), d.data()), k.general(z.data(), d.data()));
    EXPECT_EQ(k(z.data(), d.data()), mev >= 0);
    ++cases;
  }
  EXPECT_GE(cases, 10000);
}

// Any two diagonals sharing the ratio variables give the same PPT outcome.
TEST(Property, NuSufficiency) {
  std::mt19937_64 g(41);
  int cases = 0;
  for (auto split : tsupport::kSplits)
    for (int rep = 0; rep < 2500; ++rep) {
      auto s = tsupport::random_scenario(g, split);
      auto z = tsupport::random_z(g, s);
      if (!positivity_z(s, z)) {
        --rep;
        continue;
      }
      auto d1 = tsupport::random_diag(g, s.n());
      auto nu = ratio_coords(d1, split);
      auto d2 = canonical_diag(nu);
      // the oracle's margin, to skip boundary cases
      BloorePoint p{d1, z};
      auto pt = partial_transpose(build_matrix(s, p), split);
      for (int r = 0; r < s.n(); ++r)
        for (int c = 0; c < s.n(); ++c) pt(r, c) = pt(r, c) * (1.0 / std::sqrt(d1[r] * d1[c]));
      if (std::abs(min_eigenvalue(pt)) < 1e-7) continue;
      const bool a = ppt_by_eigen(s, z, d1), b = ppt_by_eigen(s, z, d2);
      EXPECT_EQ(a, b);
      EXPECT_EQ(PptKernel(s)(z.data(), d1.data()), a);
      EXPECT_EQ(ppt_predicate(s, z, nu), a);
      ++cases;
    }
  EXPECT_GE(cases, 10000);
}

// Scenarios avoiding (1,4) and (2,3) are PPT wherever they are positive,
// as long as no non-real cycle carries a phase the transpose can flip.
TEST(Property, NoEntanglingPairIsAlwaysPpt) {
  std::mt19937_64 g(43);
  const std::vector<std::vector<Pair>> sets = {
      {{1, 2, Field::Real}, {1, 3, Field::Real}, {2, 4, Field::Real}, {3, 4, Field::Real}},
      {{1, 2, Field::Complex}, {1, 3, Field::Complex}, {2, 4, Field::Quaternion}},
      {{1, 2, Field::Real}, {3, 4, Field::Real}},
      {{1, 3, Field::Complex}, {2, 4, Field::Complex}}};
  for (const auto& ps : sets) {
    auto s = make_scenario(kQubitQubit, ps);
    for (int rep = 0; rep < 3000; ++rep) {
      auto z = tsupport::random_z(g, s);
      if (!positivity_z(s, z)) continue;
      auto d = tsupport::random_diag(g, 4);
      EXPECT_TRUE(ppt_by_eigen(s, z, d));
    }
  }
}

// A complex 4-cycle is not closed under the partial transpose.
TEST(Property, ComplexCycleCanFailPpt) {
  auto s = make_scenario(kQubitQubit, {{1, 2, Field::Complex},
                                       {1, 3, Field::Complex},
                                       {2, 4, Field::Complex},
                                       {3, 4, Field::Complex}});
  std::mt19937_64 g(47);
  int fails = 0;
  for (int rep = 0; rep < 3000; ++rep) {
    auto z = tsupport::random_z(g, s);
    if (!positivity_z(s, z)) continue;
    auto d = tsupport::random_diag(g, 4);
    if (!ppt_by_eigen(s, z, d)) ++fails;
  }
  EXPECT_GT(fails, 0);
  EXPECT_FALSE(PptKernel(s).trivial());
}
