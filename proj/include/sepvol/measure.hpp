#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <span>
#include <vector>

#include "sepvol/rng.hpp"
#include "sepvol/scenario.hpp"

namespace sepvol {

/// Exponent of each diagonal entry in the Bloore volume element.
inline std::vector<double> weight_exponents(const ScenarioSpec& spec) {
  std::vector<double> w(spec.n(), 0.0);
  for (const auto& p : spec.pairs) {
    w[p.i - 1] += 0.5 * components(p.field);
    w[p.j - 1] += 0.5 * components(p.field);
  }
  return w;
}

/// Integral over the simplex of prod d_i^{w_i}, in (d_1..d_{n-1}) coordinates.
inline double dirichlet_mass(std::span<const double> w) {
  double lg = 0, tot = 0;
  for (double x : w) {
    lg += std::lgamma(x + 1.0);
    tot += x;
  }
  return std::exp(lg - std::lgamma(static_cast<double>(w.size()) + tot));
}

inline double factorial(int k) { return std::exp(std::lgamma(k + 1.0)); }

/// Lebesgue mass of the standard simplex in n-1 coordinates.
inline double simplex_mass(int n) { return 1.0 / factorial(n - 1); }

/// Uniform point on the simplex from normalized exponential spacings.
inline void sample_simplex(DrawRng& rng, int n, double* d) {
  double s = 0;
  for (int k = 0; k < n; ++k) {
    d[k] = rng.exponential();
    s += d[k];
  }
  for (int k = 0; k < n; ++k) d[k] /= s;
}

inline std::vector<double> sample_simplex(DrawRng& rng, int n) {
  std::vector<double> d(n);
  sample_simplex(rng, n, d.data());
  return d;
}

inline void sample_z(DrawRng& rng, int count, double* z) {
  for (int k = 0; k < count; ++k) z[k] = 2.0 * rng.uniform() - 1.0;
}

inline std::vector<double> sample_z(DrawRng& rng, const ScenarioSpec& spec) {
  std::vector<double> z(spec.total_components);
  sample_z(rng, spec.total_components, z.data());
  return z;
}

inline double box_volume(const ScenarioSpec& spec) { return std::ldexp(1.0, spec.total_components); }

/// Factor turning plain-Lebesgue volumes into metric Hilbert-Schmidt ones.
inline double hs_normalization(const ScenarioSpec& spec) {
  return std::pow(2.0, 0.5 * spec.total_components) * std::sqrt(static_cast<double>(spec.n()));
}

// ---------------------------------------------------------------------------
// Full real 4x4: spheroidal coordinates and nested limits

struct SpheroidalPoint {
  double gamma1 = 0, gamma2 = 1, Z34 = 0, z12 = 0, theta1 = 0, theta2 = 0;
};

struct SpheroidalImage {
  std::array<double, 6> z{};  // z12, z13, z14, z23, z24, z34
  double jacobian = 0;
};

inline SpheroidalImage spheroidal_to_z(const SpheroidalPoint& p) {
  constexpr double two_pi = 2 * std::numbers::pi;
  const double g1 = p.gamma1, g2 = p.gamma2;
  const bool ok = g1 >= 0 && g1 <= 1 && g2 >= g1 && g2 * g1 <= 1 && std::abs(p.Z34) <= g1 &&
                  std::abs(p.z12) <= 1 && p.theta1 >= 0 && p.theta1 <= two_pi && p.theta2 >= 0 &&
                  p.theta2 <= two_pi && g2 > 0;
  if (!ok) throw Error(Errc::DomainError, "spheroidal point outside its coordinate box");
  const double a = std::sqrt(1 - p.z12), b = std::sqrt(1 + p.z12);
  const double c1 = std::cos(p.theta1), s1 = std::sin(p.theta1);
  const double c2 = std::cos(p.theta2), s2 = std::sin(p.theta2);
  const double r1 = std::sqrt(std::max(0.0, 1 - g1 * g2)) / std::sqrt(2.0);
  const double r2 = std::sqrt(std::max(0.0, g2 - g1)) / (std::sqrt(2.0) * std::sqrt(g2));
  SpheroidalImage out;
  out.z[0] = p.z12;
  out.z[1] = (a * c1 + s1 * b) * r1;
  out.z[3] = (s1 * b - c1 * a) * r1;
  out.z[2] = (a * c2 + s2 * b) * r2;
  out.z[4] = (s2 * b - c2 * a) * r2;
  out.z[5] = p.Z34 + 2 * std::cos(p.theta1 - p.theta2) * r1 * r2;
  out.jacobian = (1 - p.z12 * p.z12) * g1 / (2 * g2);
  return out;
}

struct Interval {
  double lo = 0, hi = 0;
  double width() const { return hi - lo; }
};

/// Nested positivity limits of the full real 4x4 case.
inline Interval cad_z23(double z12, double z13) {
  const double r = std::sqrt((1 - z12 * z12) * (1 - z13 * z13));
  return {z12 * z13 - r, z12 * z13 + r};
}

inline Interval cad_z24(double z12, double z14) { return cad_z23(z12, z14); }

inline Interval cad_z34(double z12, double z13, double z14, double z23, double z24) {
  // The two radicands are the 3x3 minors on {1,2,3} and {1,2,4}; both are
  // nonnegative inside the earlier limits, so their product is taken.
  const double m3 = 1 - z12 * z12 - z13 * z13 + 2 * z12 * z13 * z23 - z23 * z23;
  const double m4 = 1 - z12 * z12 - z14 * z14 + 2 * z12 * z14 * z24 - z24 * z24;
  const double s = std::sqrt(std::max(0.0, m3) * std::max(0.0, m4));
  const double centre = z13 * z14 - z12 * z14 * z23 - z12 * z13 * z24 + z23 * z24;
  const double den = 1 - z12 * z12;
  return {(centre - s) / den, (centre + s) / den};
}

}  // namespace sepvol
