#pragma once

#include <cmath>
#include <numbers>
#include <string_view>

#include "sepvol/closedforms.hpp"
#include "sepvol/estimator.hpp"
#include "sepvol/special.hpp"

namespace sepvol {

// Relaxed separability for the full real 4x4 case. Each relaxation keeps
// positivity of rho and replaces the partial-transpose test by necessary
// conditions only.
enum class Relaxation { Minor14, Minor23, Minor14Plus3x3 };

inline const char* relaxation_name(Relaxation r) {
  switch (r) {
    case Relaxation::Minor14: return "minor14";
    case Relaxation::Minor23: return "minor23";
    case Relaxation::Minor14Plus3x3: return "minor14+3x3";
  }
  return "?";
}

inline Relaxation parse_relaxation(std::string_view s) {
  if (s == "minor14") return Relaxation::Minor14;
  if (s == "minor23") return Relaxation::Minor23;
  if (s == "minor14+3x3") return Relaxation::Minor14Plus3x3;
  throw Error(Errc::UnsupportedRelaxation, "unknown relaxation '" + std::string(s) + "'");
}

inline ScenarioSpec full_real_qq() {
  return make_scenario(kQubitQubit, {{1, 2, Field::Real}, {1, 3, Field::Real}, {1, 4, Field::Real},
                                     {2, 3, Field::Real}, {2, 4, Field::Real}, {3, 4, Field::Real}});
}

/// Relaxed PPT condition; z ordered (z12, z13, z14, z23, z24, z34).
inline bool relaxed_predicate(Relaxation r, const double* z, double nu) {
  const double z12 = z[0], z13 = z[1], z14 = z[2], z23 = z[3];
  const double tol = kPptEps * (1 + nu);
  const bool m14 = 1 - nu * z14 * z14 >= -tol;
  switch (r) {
    case Relaxation::Minor14: return m14;
    case Relaxation::Minor23: return nu - z23 * z23 >= -tol;
    case Relaxation::Minor14Plus3x3:
      return m14 && -z12 * z12 + 2 * std::sqrt(nu) * z12 * z13 * z14 - z13 * z13 - nu * z14 * z14 + 1 >= -tol;
  }
  return false;
}

/// Closed approximate separability function (in Hilbert-Schmidt units, i.e.
/// the z-volume times hs_normalization).
inline double approx_S(Relaxation r, double nu) {
  constexpr double pi2 = std::numbers::pi * std::numbers::pi;
  if (!(nu > 0)) throw Error(Errc::NonPositiveRatio, "nu must be positive");
  switch (r) {
    case Relaxation::Minor14:
      return nu <= 1 ? 512 * pi2 / 27 : 256 * (3 * pi2 * nu - pi2) / (27 * std::pow(nu, 1.5));
    case Relaxation::Minor23:
      return nu >= 1 ? 512 * pi2 / 27 : -256.0 / 27 * pi2 * (nu - 3) * std::sqrt(nu);
    case Relaxation::Minor14Plus3x3: break;
  }
  throw Error(Errc::UnsupportedRelaxation, "no closed form for minor14+3x3");
}

/// Sampled approximate separability function, same units as approx_S.
inline Estimate estimate_approx_S(Relaxation r, double nu, const McConfig& cfg) {
  if (!(nu > 0)) throw Error(Errc::NonPositiveRatio, "nu must be positive");
  const auto spec = full_real_qq();
  const double h = hs_normalization(spec);
  auto e = estimate_S_with(spec, RatioCoords{kQubitQubit, {nu}}, cfg,
                           [&](const double* z, const double*) { return relaxed_predicate(r, z, nu); });
  e.value *= h;
  e.std_error *= h;
  return e;
}

/// Relaxed separable volume and probability of the full real case by joint
/// sampling of (d, z).
inline VolumeEstimates estimate_relaxed_volumes(Relaxation r, const McConfig& cfg) {
  return estimate_volumes_with(full_real_qq(), cfg, [&](const double* z, const double* d) {
    return relaxed_predicate(r, z, d[0] * d[3] / (d[1] * d[2]));
  });
}

/// Quasi-separability function built from incomplete beta functions, mu = sqrt(nu).
inline double quasi_s(double mu) {
  constexpr double pi = std::numbers::pi;
  if (!(mu > 0)) throw Error(Errc::DomainError, "mu must be positive");
  const double x = mu * mu;
  if (mu < 1e-3) return pi * pi * pi * (52.0 / 9 - 0.4 * x);
  const double b1 = incomplete_beta(0.5, 1.5, x), b3 = incomplete_beta(1.5, 1.5, x), b5 = incomplete_beta(2.5, 1.5, x);
  return pi * pi * pi * (13 * b1 * x + (2 * x - 13) * b3 - 2 * b5) / (3 * mu * x);
}

enum class BoundKind { UpperSingleMinor, LowerPieced, UpperWith3x3 };

inline const char* bound_name(BoundKind k) {
  switch (k) {
    case BoundKind::UpperSingleMinor: return "upper-single-minor";
    case BoundKind::LowerPieced: return "lower-pieced";
    case BoundKind::UpperWith3x3: return "upper-with-3x3";
  }
  return "?";
}

/// Full real total volume in Hilbert-Schmidt units.
inline double hs_total_volume_real() { return std::pow(std::numbers::pi, 4) / 60480; }

/// Separable-volume bound for UpperWith3x3: the constant for mu > 1 plus
/// the mu-jacobian against quasi_s on (0, 1).
inline double bound_numerator_3x3() {
  const double tail = 11 * std::pow(std::numbers::pi, 4) / 2116800;
  return tail + integrate([](double mu) { return jacobian_mu(mu) * quasi_s(mu); }, 0.0, 1.0, 1e-18, 1e-12).value;
}

/// Probability bound by quadrature of the jacobian against the approximate
/// separability functions.
inline double bound_probability(BoundKind k) {
  const double v = hs_total_volume_real();
  auto part = [](Relaxation r, double a, double b) {
    return integrate([&](double nu) { return jacobian_real(nu) * approx_S(r, nu); }, a, b, 1e-18, 1e-12).value;
  };
  auto tail = [&](Relaxation r) {
    return integrate([&](double t) { return jacobian_real(1 / t) * approx_S(r, 1 / t) / (t * t); }, 0.0, 1.0, 1e-18,
                     1e-12)
        .value;
  };
  switch (k) {
    case BoundKind::UpperSingleMinor: return (part(Relaxation::Minor14, 0, 1) + tail(Relaxation::Minor14)) / v;
    case BoundKind::LowerPieced: return (part(Relaxation::Minor23, 0, 1) + tail(Relaxation::Minor14)) / v;
    case BoundKind::UpperWith3x3: return bound_numerator_3x3() / v;
  }
  return 0;
}

}  // namespace sepvol
