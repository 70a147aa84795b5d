#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "sepvol/scenario.hpp"

namespace sepvol::tsupport {

inline std::vector<Pair> all_pairs(int n, Field f) {
  std::vector<Pair> p;
  for (int i = 1; i <= n; ++i)
    for (int j = i + 1; j <= n; ++j) p.push_back({i, j, f});
  return p;
}

// Random subset of pairs with random fields, at least one pair.
inline ScenarioSpec random_scenario(std::mt19937_64& g, CompositeSplit split, double keep = 0.35) {
  const int n = split.dim();
  std::uniform_real_distribution<double> u(0, 1);
  std::vector<Pair> pairs;
  for (int i = 1; i <= n; ++i)
    for (int j = i + 1; j <= n; ++j)
      if (u(g) < keep) {
        const double r = u(g);
        pairs.push_back({i, j, r < 0.5 ? Field::Real : (r < 0.85 ? Field::Complex : Field::Quaternion)});
      }
  if (pairs.empty()) pairs.push_back({1, n, Field::Complex});
  return make_scenario(split, pairs);
}

// z components scaled so a useful share of points sits near the boundary.
inline std::vector<double> random_z(std::mt19937_64& g, const ScenarioSpec& s) {
  std::uniform_real_distribution<double> u(-1, 1);
  const double scale = 0.15 + 0.85 * std::abs(u(g));
  std::vector<double> z(s.total_components);
  for (double& x : z) x = scale * u(g);
  return z;
}

inline std::vector<double> random_diag(std::mt19937_64& g, int n) {
  std::exponential_distribution<double> e(1.0);
  std::vector<double> d(n);
  double t = 0;
  for (double& x : d) t += (x = 0.02 + e(g));
  for (double& x : d) x /= t;
  return d;
}

inline const CompositeSplit kSplits[] = {kQubitQubit, kQubitQutrit, kQutritQutrit, kThreeQubitBipartite,
                                         kThreeQubitTripartite};

}  // namespace sepvol::tsupport
